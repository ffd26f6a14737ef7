#pragma once

#include <string>

#include "qmam/linalg.hpp"

namespace qmam {

inline constexpr double kDefaultPaddingEps = 1.0 / 64;
inline constexpr double kDefaultValidationTol = 1e-8;
inline constexpr double kMeasurementTol = 1e-9;
inline constexpr double kMaxInverseNorm = 64.0;

/// A single-coin game: after the coin a, Arthur accepts (W, Y) with P_a.
/// Operators act on W ⊗ Y, flat index w*dY + y.
struct ProtocolInstance {
  DimTriple dims;
  ComplexMatrix p0;
  ComplexMatrix p1;
  bool padded = false;
  double padding_eps = 0.0;
};

/// The assembled program. Operators on X ⊗ W ⊗ Y use the flat index
/// a*(dW*dY) + w*dY + y; operators on X ⊗ W use a*dW + w.
struct SdpInstance {
  DimTriple dims;
  ComplexMatrix q;
  ComplexMatrix r_inv;  // Q^{-1/2}
  double qinv_norm = 0.0;  // ||Q^{-1}|| = 1 / lambda_min(Q)
  double padding_eps = 0.0;
};

struct PrimalCandidate {
  ComplexMatrix x;      // on X ⊗ W ⊗ Y
  ComplexMatrix sigma;  // on W
};

struct DualCandidate {
  ComplexMatrix y;  // on X ⊗ W
};

/// feasible <=> worst_violation >= -tol. worst_violation is the most negative
/// slack over all constraints (eigenvalue slacks, trace defect, Hermiticity).
struct ValidationReport {
  bool feasible = false;
  double objective = 0.0;
  double worst_violation = 0.0;
  std::string detail;
};

/// Throws PreconditionError unless 0 <= P_a <= 1 (within tol) with matching shapes.
void check_instance(const ProtocolInstance& inst, double tol = kMeasurementTol);

ProtocolInstance apply_soundness_padding(const ProtocolInstance& inst,
                                         double eps = kDefaultPaddingEps);

/// Value of the padded game given the value v of the original one.
inline double padded_value(double v, double eps) { return 4 * eps + (1 - 4 * eps) * v; }

/// Q = 1/2 |0><0| ⊗ P0 + 1/2 |1><1| ⊗ P1.
ComplexMatrix acceptance_operator(const ProtocolInstance& inst);

SdpInstance assemble(const ProtocolInstance& inst);

/// Tr_Y of an operator on X ⊗ W ⊗ Y (or W ⊗ Y, by passing the coin factor 1).
ComplexMatrix trace_out_y(const ComplexMatrix& a, int outer_dim, int dY);
/// Tr_X of an operator on X ⊗ W.
ComplexMatrix trace_out_coin(const ComplexMatrix& a, int dW);
/// 1_X ⊗ sigma.
ComplexMatrix coin_identity_tensor(const ComplexMatrix& sigma);

ComplexMatrix phi(const SdpInstance& sdp, const ComplexMatrix& x);
ComplexMatrix phi_adjoint(const SdpInstance& sdp, const ComplexMatrix& y);

ValidationReport validate_primal(const SdpInstance& sdp, const PrimalCandidate& cand,
                                 double tol = kDefaultValidationTol);
ValidationReport validate_dual(const SdpInstance& sdp, const DualCandidate& cand,
                               double tol = kDefaultValidationTol);
/// Dual check in the original variables: Y ⊗ 1_Y >= Q, Y >= 0. Works for
/// singular Q, where the change of variables is unavailable.
ValidationReport validate_dual_unscaled(const ProtocolInstance& inst,
                                        const DualCandidate& cand,
                                        double tol = kDefaultValidationTol);

/// Acceptance probability 1/2 <P0, rho0> + 1/2 <P1, rho1> of a strategy whose
/// two post-coin states agree on W.
double strategy_value(const ProtocolInstance& inst, const ComplexMatrix& rho0,
                      const ComplexMatrix& rho1, double tol = kMeasurementTol);

}  // namespace qmam
