#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "qmam/fixed_point.hpp"
#include "qmam/sdp.hpp"

namespace qmam {

/// A feasible Merlin strategy: post-coin states on W ⊗ Y agreeing on W.
struct Strategy {
  ComplexMatrix rho0;
  ComplexMatrix rho1;
};

/// Generator output. `known_value` is the value of the unpadded game.
struct GeneratedInstance {
  ProtocolInstance instance;
  std::string generator;
  std::uint64_t seed = 0;
  std::map<std::string, long long> params;
  std::optional<Rational> known_value;
  std::string known_value_note;
  std::optional<Strategy> witness;
};

/// P_a = |psi_a><psi_a| for two purifications of one full-rank state on W
/// that differ by a unitary on Y. Value 1. Requires dY >= dW >= 2.
GeneratedInstance gen_planted_yes(int dW, int dY, std::uint64_t seed);

/// The 2x2 instance psi0 = (|00> + |11>)/sqrt2, psi1 = (|01> + |10>)/sqrt2.
GeneratedInstance bell_planted_yes();

/// P0 = Pi_W ⊗ 1_Y for a random rank-k projector, P1 = 1 - P0. Value 1/2.
GeneratedInstance gen_planted_no(int dW, int dY, int k, std::uint64_t seed);

/// P_a random projections of the given ranks. No known value.
GeneratedInstance gen_random(int dW, int dY, int rank0, int rank1, std::uint64_t seed);

/// P0 = P1 = 1, so Q = 1/2 and the value is 1.
GeneratedInstance scalar_instance(int dW, int dY);

/// Enlarges Y by an ancilla of dimension `ancilla` (P_a -> P_a ⊗ 1). The game
/// value is unchanged.
ProtocolInstance pad_y_ancilla(const ProtocolInstance& inst, int ancilla);

}  // namespace qmam
