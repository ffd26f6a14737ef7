#include "qmam/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmam/errors.hpp"
#include "qmam/random.hpp"

namespace qmam {

namespace {

constexpr int kRefineSteps = 24;
constexpr double kRefineInitialStep = 0.5;
constexpr double kRefineShrink = 0.85;

ProtocolInstance unpad(const ProtocolInstance& inst) {
  if (!inst.padded) return inst;
  const double eps = inst.padding_eps;
  ProtocolInstance out = inst;
  const ComplexMatrix id = identity(inst.dims.wy());
  out.p0 = (inst.p0 - 4 * eps * id) / (1 - 4 * eps);
  out.p1 = (inst.p1 - 4 * eps * id) / (1 - 4 * eps);
  out.padded = false;
  out.padding_eps = 0.0;
  return out;
}

// Pure strategy (1 ⊗ V_a)|u> evaluated against P_a.
double branch_value(const ComplexMatrix& p, const ComplexVector& u, const ComplexMatrix& v,
                    int dW) {
  const int dY = static_cast<int>(v.rows());
  ComplexVector out(dW * dY);
  for (int w = 0; w < dW; ++w) out.segment(w * dY, dY) = v * u.segment(w * dY, dY);
  return out.dot(p * out).real();
}

ComplexMatrix branch_state(const ComplexVector& u, const ComplexMatrix& v, int dW) {
  const int dY = static_cast<int>(v.rows());
  ComplexVector out(dW * dY);
  for (int w = 0; w < dW; ++w) out.segment(w * dY, dY) = v * u.segment(w * dY, dY);
  return hermitize(out * out.adjoint());
}

// Haar start followed by a seeded accept-if-better walk V <- exp(i t H) V.
ComplexMatrix best_unitary(const ComplexMatrix& p, const ComplexVector& u, int dW, int dY,
                           Rng& rng) {
  ComplexMatrix v = haar_unitary(dY, rng);
  double best = branch_value(p, u, v, dW);
  double step = kRefineInitialStep;
  for (int i = 0; i < kRefineSteps; ++i) {
    const ComplexMatrix h = random_hermitian(dY, 1.0, rng);
    const ComplexMatrix rotation = matrix_exp(Complex{0.0, step} * h, 1e-14, 1);
    const ComplexMatrix candidate = rotation * v;
    const double value = branch_value(p, u, candidate, dW);
    if (value > best) {
      best = value;
      v = candidate;
    } else {
      step *= kRefineShrink;
    }
  }
  return v;
}

}  // namespace

std::optional<ComplexMatrix> planted_no_projector(const ProtocolInstance& inst, double tol) {
  const ProtocolInstance raw = unpad(inst);
  const int dW = raw.dims.dW;
  const int dY = raw.dims.dY;
  const int d = raw.dims.wy();
  if (raw.p0.rows() != d || raw.p1.rows() != d) return std::nullopt;
  if ((raw.p0 + raw.p1 - identity(d)).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  if ((raw.p0 * raw.p0 - raw.p0).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  const ComplexMatrix pi_w = hermitize(trace_out_y(raw.p0, dW, dY) / static_cast<double>(dY));
  if ((tensor(pi_w, identity(dY)) - raw.p0).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  return pi_w;
}

std::optional<double> closed_form_value(const ProtocolInstance& inst) {
  const ProtocolInstance raw = unpad(inst);
  const auto finish = [&](double v) {
    return inst.padded ? padded_value(v, inst.padding_eps) : v;
  };
  if (raw.dims.dW == 1) {
    // sigma is the scalar 1; each branch independently picks its top eigenvector.
    return finish(0.5 * lambda_max(raw.p0) + 0.5 * lambda_max(raw.p1));
  }
  if (raw.dims.dY == 1) {
    // rho0 = rho1 = sigma is forced.
    return finish(lambda_max(hermitize(0.5 * (raw.p0 + raw.p1))));
  }
  if (planted_no_projector(inst)) return finish(0.5);
  return std::nullopt;
}

DualCandidate optimal_dual_for_planted_no(const ProtocolInstance& inst) {
  const std::optional<ComplexMatrix> pi_w = planted_no_projector(inst);
  if (!pi_w) {
    throw PreconditionError("optimal_dual_for_planted_no: instance lacks the planted-no structure");
  }
  const double eps = inst.padded ? inst.padding_eps : 0.0;
  const int dW = inst.dims.dW;
  const ComplexMatrix id = identity(dW);
  const ComplexMatrix block0 = 4 * eps * id + (1 - 4 * eps) * *pi_w;
  const ComplexMatrix block1 = 4 * eps * id + (1 - 4 * eps) * (id - *pi_w);
  DualCandidate y;
  y.y = ComplexMatrix::Zero(2 * dW, 2 * dW);
  y.y.topLeftCorner(dW, dW) = 0.5 * block0;
  y.y.bottomRightCorner(dW, dW) = 0.5 * block1;
  y.y = hermitize(y.y);
  return y;
}

LowerBound random_search_lower_bound(const ProtocolInstance& inst, int samples,
                                     std::uint64_t seed) {
  const int dW = inst.dims.dW;
  const int dY = inst.dims.dY;
  if (dY < dW) {
    std::ostringstream msg;
    msg << "random_search_lower_bound: needs dY >= dW to purify states on W (dW = " << dW
        << ", dY = " << dY << "); enlarge Y with pad_y_ancilla";
    throw PreconditionError(msg.str());
  }
  if (samples < 1) throw PreconditionError("random_search_lower_bound: samples must be positive");

  LowerBound best;
  bool have = false;
  for (int i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const ComplexMatrix sigma = random_density(dW, rng);
    // |u> with Tr_Y |u><u| = sigma, built from sqrt(sigma).
    const SpectralDecomposition dec = spectral_decomposition(sigma, 0x1p-40);
    const RealVector roots = dec.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    const ComplexMatrix root = dec.unitary * roots.cast<Complex>().asDiagonal() * dec.unitary.adjoint();
    ComplexVector u = ComplexVector::Zero(dW * dY);
    for (int w = 0; w < dW; ++w) {
      for (int y = 0; y < dW; ++y) u(w * dY + y) = root(w, y);
    }
    const ComplexMatrix v0 = best_unitary(inst.p0, u, dW, dY, rng);
    const ComplexMatrix v1 = best_unitary(inst.p1, u, dW, dY, rng);
    Strategy s{branch_state(u, v0, dW), branch_state(u, v1, dW)};
    const double value = strategy_value(inst, s.rho0, s.rho1, 1e-9);
    if (!have || value > best.value) {
      best.value = value;
      best.witness = std::move(s);
      have = true;
    }
  }
  return best;
}

ValueBracket bracket(const ProtocolInstance& inst, const SdpInstance& sdp, int samples,
                     std::uint64_t seed, const BracketExtras& extras) {
  if (!(sdp.dims == inst.dims)) throw DimensionError("bracket: instance and program dimensions differ");
  ValueBracket out;

  // Lower side: sampler (after enlarging Y if needed) and supplied witnesses.
  ProtocolInstance searchable = inst;
  if (inst.dims.dY < inst.dims.dW) {
    const int ancilla = (inst.dims.dW + inst.dims.dY - 1) / inst.dims.dY;
    searchable = pad_y_ancilla(inst, ancilla);
  }
  LowerBound lb = random_search_lower_bound(searchable, samples, seed);
  out.lower = lb.value;
  out.lower_source = "random_search";
  if (searchable.dims == inst.dims) out.lower_witness = std::move(lb.witness);
  for (const Strategy& w : extras.witnesses) {
    const double value = strategy_value(inst, w.rho0, w.rho1, 1e-9);
    if (value > out.lower) {
      out.lower = value;
      out.lower_source = "witness";
      out.lower_witness = w;
    }
  }

  // Upper side: Y = 1/2 is always feasible since Q <= 1/2.
  const int xw = inst.dims.xw();
  DualCandidate trivial{0.5 * identity(xw)};
  out.upper = 1.0;
  out.upper_source = "trivial";
  out.upper_witness = trivial;
  std::vector<std::pair<DualCandidate, std::string>> duals;
  if (planted_no_projector(inst)) duals.emplace_back(optimal_dual_for_planted_no(inst), "planted_no_optimal");
  for (const DualCandidate& y : extras.duals) duals.emplace_back(y, "solver");
  for (const auto& [y, source] : duals) {
    const ValidationReport rep = validate_dual(sdp, y);
    if (rep.feasible && rep.objective < out.upper) {
      out.upper = rep.objective;
      out.upper_source = source;
      out.upper_witness = y;
    }
  }
  return out;
}

}  // namespace qmam
