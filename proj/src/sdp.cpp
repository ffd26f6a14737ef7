#include "qmam/sdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "qmam/errors.hpp"

namespace qmam {

namespace {

void expect_shape(const ComplexMatrix& a, Eigen::Index dim, const char* what) {
  if (a.rows() != dim || a.cols() != dim) {
    std::ostringstream msg;
    msg << what << ": expected " << dim << "x" << dim << ", got " << a.rows() << "x"
        << a.cols();
    throw DimensionError(msg.str());
  }
}

// Accumulates the most negative slack and remembers which constraint it came from.
class SlackTracker {
 public:
  void add(double slack, const char* name) {
    if (first_ || slack < worst_) {
      worst_ = slack;
      name_ = name;
      first_ = false;
    }
  }
  ValidationReport report(double objective, double tol) const {
    ValidationReport r;
    r.objective = objective;
    r.worst_violation = worst_;
    r.feasible = worst_ >= -tol;
    std::ostringstream msg;
    msg << "tightest constraint: " << name_ << " (slack " << worst_ << ")";
    r.detail = msg.str();
    return r;
  }

 private:
  double worst_ = 0.0;
  const char* name_ = "";
  bool first_ = true;
};

}  // namespace

void check_instance(const ProtocolInstance& inst, double tol) {
  check_dims(inst.dims);
  const int d = inst.dims.wy();
  expect_shape(inst.p0, d, "P0");
  expect_shape(inst.p1, d, "P1");
  const std::array<const ComplexMatrix*, 2> ops{&inst.p0, &inst.p1};
  for (int a = 0; a < 2; ++a) {
    const ComplexMatrix& p = *ops[a];
    const double defect = hermitian_defect(p);
    if (defect > tol) {
      std::ostringstream msg;
      msg << "P" << a << " is not Hermitian (defect " << defect << ")";
      throw PreconditionError(msg.str());
    }
    const RealVector ev = hermitian_eigenvalues(hermitize(p));
    if (ev.minCoeff() < -tol || ev.maxCoeff() > 1 + tol) {
      std::ostringstream msg;
      msg << "P" << a << " is not a measurement operator: spectrum ["
          << ev.minCoeff() << ", " << ev.maxCoeff() << "] not within [0, 1]";
      throw PreconditionError(msg.str());
    }
  }
}

ProtocolInstance apply_soundness_padding(const ProtocolInstance& inst, double eps) {
  if (inst.padded) throw PreconditionError("instance is already padded");
  if (!(eps >= 0.0 && eps <= 0.25)) {
    throw std::invalid_argument("padding eps must lie in [0, 1/4]");
  }
  check_dims(inst.dims);
  ProtocolInstance out = inst;
  const ComplexMatrix id = identity(inst.dims.wy());
  out.p0 = 4 * eps * id + (1 - 4 * eps) * inst.p0;
  out.p1 = 4 * eps * id + (1 - 4 * eps) * inst.p1;
  out.padded = true;
  out.padding_eps = eps;
  return out;
}

ComplexMatrix acceptance_operator(const ProtocolInstance& inst) {
  const int d = inst.dims.wy();
  expect_shape(inst.p0, d, "P0");
  expect_shape(inst.p1, d, "P1");
  ComplexMatrix q = ComplexMatrix::Zero(2 * d, 2 * d);
  q.topLeftCorner(d, d) = 0.5 * inst.p0;
  q.bottomRightCorner(d, d) = 0.5 * inst.p1;
  return hermitize(q);
}

SdpInstance assemble(const ProtocolInstance& inst) {
  check_instance(inst);
  SdpInstance sdp;
  sdp.dims = inst.dims;
  sdp.padding_eps = inst.padding_eps;
  sdp.q = acceptance_operator(inst);

  const RealVector ev = hermitian_eigenvalues(sdp.q);
  const double lmin = ev.minCoeff();
  if (!(lmin * kMaxInverseNorm >= 1.0)) {
    std::ostringstream msg;
    msg << "Q must be invertible with ||Q^{-1}|| <= 64; lambda_min(Q) = " << lmin
        << " (apply soundness padding first)";
    throw PreconditionError(msg.str());
  }

  const InverseSqrt root = inv_sqrt(sdp.q, 0x1p-40);
  sdp.r_inv = root.r_inv;
  sdp.qinv_norm = 1.0 / root.lambda_min;
  if (sdp.qinv_norm > kMaxInverseNorm) {
    throw PreconditionError("Q must satisfy ||Q^{-1}|| <= 64");
  }
  const ComplexMatrix check = sdp.r_inv * sdp.q * sdp.r_inv - identity(sdp.dims.N());
  if (spectral_norm(check) > 1e-6) {
    throw ConvergenceError("assemble: Q^{-1/2} Q Q^{-1/2} is not the identity",
                           spectral_norm(check));
  }
  return sdp;
}

ComplexMatrix trace_out_y(const ComplexMatrix& a, int outer_dim, int dY) {
  const std::array<int, 2> dims{outer_dim, dY};
  return partial_trace(a, dims, 1);
}

ComplexMatrix trace_out_coin(const ComplexMatrix& a, int dW) {
  const std::array<int, 2> dims{DimTriple::dX, dW};
  return partial_trace(a, dims, 0);
}

ComplexMatrix coin_identity_tensor(const ComplexMatrix& sigma) {
  return tensor(identity(DimTriple::dX), sigma);
}

ComplexMatrix phi(const SdpInstance& sdp, const ComplexMatrix& x) {
  expect_shape(x, sdp.dims.N(), "phi: X");
  const ComplexMatrix out = trace_out_y(sdp.r_inv * x * sdp.r_inv, sdp.dims.xw(), sdp.dims.dY);
  return is_hermitian(x) ? hermitize(out) : out;
}

ComplexMatrix phi_adjoint(const SdpInstance& sdp, const ComplexMatrix& y) {
  expect_shape(y, sdp.dims.xw(), "phi_adjoint: Y");
  const ComplexMatrix out = sdp.r_inv * tensor(y, identity(sdp.dims.dY)) * sdp.r_inv;
  return is_hermitian(y) ? hermitize(out) : out;
}

ValidationReport validate_primal(const SdpInstance& sdp, const PrimalCandidate& cand,
                                 double tol) {
  expect_shape(cand.x, sdp.dims.N(), "validate_primal: X");
  expect_shape(cand.sigma, sdp.dims.M(), "validate_primal: sigma");
  const ComplexMatrix x = hermitize(cand.x);
  const ComplexMatrix sigma = hermitize(cand.sigma);

  SlackTracker slack;
  slack.add(-hermitian_defect(cand.x), "X Hermitian");
  slack.add(-hermitian_defect(cand.sigma), "sigma Hermitian");
  slack.add(lambda_min(coin_identity_tensor(sigma) - phi(sdp, x)), "1_X (x) sigma - Phi(X) >= 0");
  slack.add(lambda_min(x), "X >= 0");
  slack.add(lambda_min(sigma), "sigma >= 0");
  slack.add(-std::abs(sigma.trace().real() - 1.0), "Tr(sigma) = 1");
  return slack.report(x.trace().real(), tol);
}

ValidationReport validate_dual(const SdpInstance& sdp, const DualCandidate& cand,
                               double tol) {
  expect_shape(cand.y, sdp.dims.xw(), "validate_dual: Y");
  const ComplexMatrix y = hermitize(cand.y);

  SlackTracker slack;
  slack.add(-hermitian_defect(cand.y), "Y Hermitian");
  slack.add(lambda_min(phi_adjoint(sdp, y)) - 1.0, "Phi*(Y) >= 1");
  slack.add(lambda_min(y), "Y >= 0");
  return slack.report(spectral_norm(trace_out_coin(y, sdp.dims.dW)), tol);
}

ValidationReport validate_dual_unscaled(const ProtocolInstance& inst,
                                        const DualCandidate& cand, double tol) {
  expect_shape(cand.y, inst.dims.xw(), "validate_dual_unscaled: Y");
  const ComplexMatrix y = hermitize(cand.y);
  const ComplexMatrix q = acceptance_operator(inst);

  SlackTracker slack;
  slack.add(-hermitian_defect(cand.y), "Y Hermitian");
  slack.add(lambda_min(tensor(y, identity(inst.dims.dY)) - q), "Y (x) 1_Y >= Q");
  slack.add(lambda_min(y), "Y >= 0");
  return slack.report(spectral_norm(trace_out_coin(y, inst.dims.dW)), tol);
}

double strategy_value(const ProtocolInstance& inst, const ComplexMatrix& rho0,
                      const ComplexMatrix& rho1, double tol) {
  const int d = inst.dims.wy();
  expect_shape(rho0, d, "strategy_value: rho0");
  expect_shape(rho1, d, "strategy_value: rho1");
  const std::array<const ComplexMatrix*, 2> states{&rho0, &rho1};
  for (int a = 0; a < 2; ++a) {
    const ComplexMatrix& rho = *states[a];
    const double trace_err = std::abs(rho.trace() - Complex{1.0, 0.0});
    if (hermitian_defect(rho) > tol || trace_err > tol || lambda_min(hermitize(rho)) < -tol) {
      std::ostringstream msg;
      msg << "strategy_value: rho" << a << " is not a density operator";
      throw PreconditionError(msg.str());
    }
  }
  const ComplexMatrix gap =
      trace_out_y(rho0, inst.dims.dW, inst.dims.dY) - trace_out_y(rho1, inst.dims.dW, inst.dims.dY);
  const double mismatch = spectral_norm(gap);
  if (mismatch > tol) {
    std::ostringstream msg;
    msg << "strategy_value: the two states must agree on W (Tr_Y(rho0) = Tr_Y(rho1)); "
        << "marginals differ by " << mismatch;
    throw PreconditionError(msg.str());
  }
  return 0.5 * inner_product(inst.p0, rho0).real() + 0.5 * inner_product(inst.p1, rho1).real();
}

}  // namespace qmam
