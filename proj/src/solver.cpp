#include "qmam/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qmam/errors.hpp"

namespace qmam {

namespace {

using Float100 = boost::multiprecision::cpp_bin_float_100;

double to_double(const Rational& r) { return r.convert_to<double>(); }

Float100 to_float100(const Rational& r) {
  return Float100(boost::multiprecision::numerator(r)) /
         Float100(boost::multiprecision::denominator(r));
}

std::string rational_string(const Rational& r) {
  std::ostringstream out;
  out << boost::multiprecision::numerator(r) << "/" << boost::multiprecision::denominator(r);
  return out.str();
}

// exp(sign * s * (H - shift)) / Tr with shift the extreme eigenvalue, so the
// exponent is negative semidefinite and nothing overflows. Returns the
// normalized operator and log Tr exp(sign * s * H).
struct NormalizedExp {
  ComplexMatrix state;
  double log_trace = 0.0;
};

NormalizedExp normalized_exp(const ComplexMatrix& h, double s, int sign, double eta) {
  const RealVector ev = hermitian_eigenvalues(h);
  const double shift = sign < 0 ? ev.minCoeff() : ev.maxCoeff();
  const double spread = s * (ev.maxCoeff() - ev.minCoeff());
  const ComplexMatrix exponent =
      hermitize(static_cast<double>(sign) * s * (h - shift * identity(static_cast<int>(h.rows()))));
  const int k = static_cast<int>(std::ceil(spread)) + 1;
  const ComplexMatrix e = matrix_exp(exponent, eta, k);
  const double trace = e.trace().real();
  NormalizedExp out;
  out.state = hermitize(e / trace);
  out.log_trace = sign * s * shift + std::log(trace);
  return out;
}

}  // namespace

double SolverConfig::step() const { return to_double(eps * delta * step_scale); }
double SolverConfig::gamma_value() const { return to_double(gamma); }
double SolverConfig::eps_value() const { return to_double(eps); }
double SolverConfig::mu_value() const { return to_double(mu); }
double SolverConfig::delta_value() const { return to_double(delta); }

std::int64_t faithful_iteration_count(int n, const Rational& eps, const Rational& delta) {
  if (n < 2) throw std::invalid_argument("faithful_iteration_count: N must be at least 2");
  const Float100 value = 4 * boost::multiprecision::log(Float100(n)) /
                         (to_float100(eps * eps * eps * delta));
  const Float100 ceiling = boost::multiprecision::ceil(value);
  if (ceiling > Float100(std::numeric_limits<std::int64_t>::max())) {
    throw std::overflow_error("faithful_iteration_count: T does not fit in 64 bits");
  }
  return ceiling.convert_to<std::int64_t>();
}

SolverConfig configure(const SdpInstance& sdp, const ConfigOverrides& ov) {
  if (!(sdp.qinv_norm > 0.0) || sdp.qinv_norm > kMaxInverseNorm) {
    throw PreconditionError("configure: instance must satisfy ||Q^{-1}|| <= 64");
  }
  SolverConfig cfg;
  if (ov.mode) cfg.mode = *ov.mode;
  const bool faithful = cfg.mode == SolveMode::faithful;
  if (faithful) {
    if (ov.gamma && *ov.gamma != Rational(4, 3)) {
      throw PreconditionError("configure: faithful mode requires gamma = 4/3");
    }
    if (ov.eps && *ov.eps != Rational(1, 64)) {
      throw PreconditionError("configure: faithful mode requires eps = 1/64");
    }
    if (ov.step_scale && *ov.step_scale != Rational(1)) {
      throw PreconditionError("configure: faithful mode uses the step eps*delta (step_scale = 1)");
    }
  }
  if (ov.gamma) cfg.gamma = *ov.gamma;
  if (ov.eps) cfg.eps = *ov.eps;
  if (ov.mu) cfg.mu = *ov.mu;
  if (cfg.gamma <= 1) throw PreconditionError("configure: gamma must exceed 1");
  if (cfg.eps <= 0 || cfg.eps >= Rational(1, 4)) {
    throw PreconditionError("configure: eps must lie in (0, 1/4)");
  }
  if (cfg.mu < 0) throw PreconditionError("configure: mu must be non-negative");

  cfg.delta = cfg.eps / (2 * exact_rational(sdp.qinv_norm));
  cfg.T = faithful_iteration_count(sdp.dims.N(), cfg.eps, cfg.delta);
  if (ov.iterations) {
    if (*ov.iterations < 1) throw PreconditionError("configure: iteration count must be positive");
    cfg.T = *ov.iterations;
  }

  if (faithful) {
    cfg.step_scale = 1;
  } else {
    cfg.step_scale = ov.step_scale ? *ov.step_scale : Rational(1, 10) / (cfg.eps * cfg.delta);
    if (cfg.step_scale <= 0) throw PreconditionError("configure: step_scale must be positive");
  }
  if (ov.iteration_cap) {
    if (*ov.iteration_cap < 0) throw PreconditionError("configure: iteration cap must be non-negative");
    cfg.iteration_cap = *ov.iteration_cap;
  }
  if (ov.polish_iterations) cfg.polish_iterations = std::max<std::int64_t>(0, *ov.polish_iterations);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.fixed_point_bits) {
    const int bits = *ov.fixed_point_bits == 0 ? default_fixed_point_bits(sdp.dims.N())
                                               : *ov.fixed_point_bits;
    if (bits < 8 || bits > 1000) throw PreconditionError("configure: fixed-point bits out of range");
    cfg.fixed_point_bits = bits;
    cfg.validation_tol = cfg.mu_value() / sdp.dims.M();
  }
  if (ov.validation_tol) cfg.validation_tol = *ov.validation_tol;
  return cfg;
}

IterationState initial_state(const SdpInstance& sdp) {
  IterationState state;
  const int n = sdp.dims.N();
  const int m = sdp.dims.M();
  state.rho = identity(n) / static_cast<double>(n);
  state.xi = identity(m) / static_cast<double>(m);
  state.accum = ComplexMatrix::Zero(sdp.dims.xw(), sdp.dims.xw());
  return state;
}

bool accept_rule(double beta, const SolverConfig& cfg) { return beta <= cfg.eps_value(); }

const ProjectionStep& compute_projection(const SdpInstance& sdp, const SolverConfig& cfg,
                                         IterationState& state) {
  if (state.current) return *state.current;
  ProjectionStep step;
  step.phi_rho = phi(sdp, state.rho);
  const ComplexMatrix h =
      hermitize(step.phi_rho - cfg.gamma_value() * coin_identity_tensor(state.xi));
  step.projection = positive_projection(h, cfg.projection_eta).projection;
  if (cfg.fixed_point_bits) {
    step.projection = fixed_point_round(step.projection, *cfg.fixed_point_bits);
    Rational exact = exact_beta(sdp, step.projection, state.rho);
    step.beta = exact.convert_to<double>();
    step.accept = exact <= cfg.eps;
    step.beta_exact = std::move(exact);
  } else {
    step.beta = inner_product(step.projection, step.phi_rho).real();
    step.accept = accept_rule(step.beta, cfg);
  }
  state.current = std::move(step);
  return *state.current;
}

std::optional<PrimalCandidate> check_accept(const SdpInstance& sdp, const SolverConfig& cfg,
                                            IterationState& state) {
  const ProjectionStep& step = compute_projection(sdp, cfg, state);
  if (!step.accept) return std::nullopt;
  const double gamma = cfg.gamma_value();
  const double mu = cfg.mu_value();
  const int m = sdp.dims.M();
  const double denom = gamma + 2 * step.beta + mu;

  const ComplexMatrix compressed = step.projection * step.phi_rho * step.projection;
  PrimalCandidate cand;
  cand.x = hermitize(state.rho / denom);
  cand.sigma = hermitize((gamma * state.xi + 2 * trace_out_coin(compressed, m) +
                          (mu / m) * identity(m)) /
                         denom);
  return cand;
}

IterationState iterate(const SdpInstance& sdp, const SolverConfig& cfg, IterationState state) {
  const ProjectionStep& step = compute_projection(sdp, cfg, state);
  if (step.accept) {
    throw ContractViolation("iterate: beta_t <= eps; the accept branch must be taken first");
  }
  TraceRecord record;
  record.t = state.t;
  record.beta = step.beta;
  if (step.beta_exact) record.beta_exact = rational_string(*step.beta_exact);

  state.accum = hermitize(state.accum + step.projection / step.beta);

  const double s = cfg.step();
  const double mu = cfg.mu_value();
  const double delta = cfg.delta_value();
  const double eta_rho = mu * delta / (4.0 * sdp.dims.N());
  const double eta_xi = mu * delta / (4.0 * sdp.dims.M());

  NormalizedExp w = normalized_exp(phi_adjoint(sdp, state.accum), s, -1, eta_rho);
  NormalizedExp z = normalized_exp(trace_out_coin(state.accum, sdp.dims.M()), s, +1, eta_xi);
  state.rho = std::move(w.state);
  state.xi = std::move(z.state);
  if (cfg.fixed_point_bits) {
    state.rho = fixed_point_round(state.rho, *cfg.fixed_point_bits);
    state.xi = fixed_point_round(state.xi, *cfg.fixed_point_bits);
  }
  state.t += 1;
  state.current.reset();
  state.trace_log.push_back(std::move(record));
  return state;
}

std::optional<DualCertificate> extract_dual_certificate(const SdpInstance& sdp,
                                                        const SolverConfig& cfg,
                                                        const IterationState& state) {
  if (state.t < 1) return std::nullopt;
  DualCertificate cert;
  if (cfg.mode == SolveMode::faithful) {
    if (state.t != cfg.T) return std::nullopt;
    const double scale = to_double((1 + 2 * cfg.eps) * (1 + 2 * cfg.mu)) / static_cast<double>(cfg.T);
    cert.candidate.y = hermitize(scale * state.accum);
  } else {
    const ComplexMatrix average = state.accum / static_cast<double>(state.t);
    const double m = lambda_min(phi_adjoint(sdp, average));
    if (!(m > 0.0)) return std::nullopt;
    cert.candidate.y = hermitize(average / m);
  }
  cert.report = validate_dual(sdp, cert.candidate, cfg.validation_tol);
  cert.objective = cert.report.objective;
  return cert;
}

namespace {

constexpr double kAcceptFloor = 5.0 / 8.0;
constexpr double kRejectCeiling = 7.0 / 8.0;

void emit(SolveOutcome& out, const TraceRecord& record, const TraceSink& sink) {
  out.trace.push_back(record);
  if (sink) sink(record);
}

// Accept branch shared by both modes.
SolveOutcome finish_accept(const SdpInstance& sdp, const SolverConfig& cfg, IterationState& state,
                           SolveOutcome out, const TraceSink& sink) {
  const ProjectionStep& step = compute_projection(sdp, cfg, state);
  TraceRecord record;
  record.t = state.t;
  record.beta = step.beta;
  if (step.beta_exact) record.beta_exact = rational_string(*step.beta_exact);
  record.accepted = true;
  emit(out, record, sink);

  PrimalCandidate cand = *check_accept(sdp, cfg, state);
  out.report = validate_primal(sdp, cand, cfg.validation_tol);
  out.iterations_used = state.t;
  out.objective = out.report.objective;
  if (out.report.feasible && out.report.objective > kAcceptFloor) {
    out.verdict = Verdict::accept;
    out.primal = std::move(cand);
  } else {
    out.verdict = Verdict::inconclusive;
    out.diagnostics = "accept condition reached but the primal certificate did not validate: " +
                      out.report.detail;
  }
  return out;
}

SolveOutcome finish_reject(DualCertificate cert, std::int64_t iterations, SolveOutcome out) {
  out.verdict = Verdict::reject;
  out.objective = cert.objective;
  out.report = cert.report;
  out.dual = std::move(cert.candidate);
  out.iterations_used = iterations;
  return out;
}

bool usable_reject(const std::optional<DualCertificate>& cert) {
  return cert && cert->report.feasible && cert->objective < kRejectCeiling;
}

SolveOutcome solve_faithful(const SdpInstance& sdp, const SolverConfig& cfg, const TraceSink& sink) {
  SolveOutcome out;
  out.mode = cfg.mode;
  IterationState state = initial_state(sdp);
  while (state.t < cfg.T) {
    if (compute_projection(sdp, cfg, state).accept) {
      return finish_accept(sdp, cfg, state, std::move(out), sink);
    }
    state = iterate(sdp, cfg, std::move(state));
    emit(out, state.trace_log.back(), sink);
  }
  std::optional<DualCertificate> cert = extract_dual_certificate(sdp, cfg, state);
  if (usable_reject(cert)) return finish_reject(std::move(*cert), state.t, std::move(out));
  out.verdict = Verdict::inconclusive;
  out.iterations_used = state.t;
  out.diagnostics = cert ? "dual candidate after T iterations did not validate: " + cert->report.detail
                         : "no dual candidate after T iterations";
  return out;
}

SolveOutcome solve_certified(const SdpInstance& sdp, const SolverConfig& cfg, const TraceSink& sink) {
  SolveOutcome out;
  out.mode = cfg.mode;
  IterationState state = initial_state(sdp);
  std::optional<DualCertificate> best;
  std::int64_t polish_left = cfg.polish_iterations;

  for (;;) {
    if (compute_projection(sdp, cfg, state).accept) {
      if (best) {
        // Cannot happen on a consistent instance: a validated dual below 7/8
        // rules out a primal certificate above 5/8.
        out.diagnostics = "accept condition reached after a reject certificate was validated";
        return finish_reject(std::move(*best), state.t, std::move(out));
      }
      return finish_accept(sdp, cfg, state, std::move(out), sink);
    }
    if (state.t >= cfg.iteration_cap) break;

    state = iterate(sdp, cfg, std::move(state));
    TraceRecord record = state.trace_log.back();
    std::optional<DualCertificate> cert = extract_dual_certificate(sdp, cfg, state);
    if (cert) record.dual_objective = cert->objective;
    emit(out, record, sink);

    if (usable_reject(cert) && (!best || cert->objective < best->objective)) best = std::move(cert);
    if (best && polish_left-- <= 0) break;
  }
  if (best) return finish_reject(std::move(*best), state.t, std::move(out));
  out.verdict = Verdict::inconclusive;
  out.iterations_used = state.t;
  out.diagnostics = "iteration cap reached without a validated certificate";
  return out;
}

}  // namespace

SolveOutcome solve(const SdpInstance& sdp, const SolverConfig& cfg, const TraceSink& sink) {
  if (sdp.qinv_norm > kMaxInverseNorm) {
    throw PreconditionError("solve: instance must satisfy ||Q^{-1}|| <= 64");
  }
  return cfg.mode == SolveMode::faithful ? solve_faithful(sdp, cfg, sink)
                                         : solve_certified(sdp, cfg, sink);
}

PotentialSnapshot reconstruct_potentials(const SdpInstance& sdp, const SolverConfig& cfg,
                                         const ComplexMatrix& accum, double eta) {
  const double s = cfg.step();
  NormalizedExp w = normalized_exp(phi_adjoint(sdp, accum), s, -1, eta);
  NormalizedExp z = normalized_exp(trace_out_coin(accum, sdp.dims.M()), s, +1, eta);
  PotentialSnapshot snap;
  snap.log_trace_w = w.log_trace;
  snap.log_trace_z = z.log_trace;
  snap.w_normalized = std::move(w.state);
  snap.z_normalized = std::move(z.state);
  return snap;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::accept: return "accept";
    case Verdict::reject: return "reject";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(SolveMode m) {
  return m == SolveMode::faithful ? "faithful" : "certified";
}

SolveMode parse_mode(const std::string& s) {
  if (s == "faithful") return SolveMode::faithful;
  if (s == "certified") return SolveMode::certified;
  throw std::invalid_argument("unknown solver mode '" + s + "'");
}

}  // namespace qmam
