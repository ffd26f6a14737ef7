#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmam/generators.hpp"
#include "qmam/sdp.hpp"

namespace qmam {

/// Weak-duality sandwich lower <= value <= upper.
struct ValueBracket {
  double lower = 0.0;
  double upper = 1.0;
  std::string lower_source;
  std::string upper_source;
  std::optional<Strategy> lower_witness;
  std::optional<DualCandidate> upper_witness;
};

/// Exact value when the marginal constraint trivializes (dW = 1 or dY = 1) or
/// the instance has the planted-no structure. Padded instances are unpadded,
/// evaluated, and mapped back through the padding.
std::optional<double> closed_form_value(const ProtocolInstance& inst);

/// Pi_W if P0 = Pi_W ⊗ 1_Y with Pi_W a projector and P1 = 1 - P0 (before padding).
std::optional<ComplexMatrix> planted_no_projector(const ProtocolInstance& inst,
                                                  double tol = kMeasurementTol);

/// Y* = 1/2 |0><0| ⊗ (4e + (1-4e) Pi_W) + 1/2 |1><1| ⊗ (4e + (1-4e)(1 - Pi_W)),
/// objective 1/2 + 2e with e the instance's padding eps (0 when unpadded).
DualCandidate optimal_dual_for_planted_no(const ProtocolInstance& inst);

struct LowerBound {
  double value = 0.0;
  Strategy witness;
};

/// Best acceptance probability over seeded strategies of the form: sample a
/// state sigma on W, purify it into W ⊗ Y, apply a unitary V_a on Y after
/// coin a. Each V_a is refined by a short seeded local search. Sample i draws
/// from its own stream, so the result is nondecreasing in `samples`.
LowerBound random_search_lower_bound(const ProtocolInstance& inst, int samples,
                                     std::uint64_t seed);

struct BracketExtras {
  std::vector<Strategy> witnesses;
  std::vector<DualCandidate> duals;
};

/// Requires an assembled program for the same (padded) instance.
ValueBracket bracket(const ProtocolInstance& inst, const SdpInstance& sdp, int samples,
                     std::uint64_t seed, const BracketExtras& extras = {});

}  // namespace qmam
