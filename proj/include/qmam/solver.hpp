#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmam/fixed_point.hpp"
#include "qmam/linalg.hpp"
#include "qmam/sdp.hpp"

namespace qmam {

enum class SolveMode { faithful, certified };

/// Solver constants. Rationals are exact; `step()` and friends give the
/// double values used by the iteration.
struct SolverConfig {
  Rational gamma{4, 3};
  Rational eps{1, 64};
  Rational delta;       // eps / (2 ||Q^{-1}||)
  std::int64_t T = 0;   // ceil(4 ln N / (eps^3 delta)), or the override
  SolveMode mode = SolveMode::certified;
  Rational step_scale{1};  // multiplier on eps * delta
  std::int64_t iteration_cap = 10000;
  std::optional<int> fixed_point_bits;
  Rational mu{1, 1024};
  std::uint64_t seed = 0;
  // Certified mode keeps iterating this many steps after the first validated
  // reject certificate and reports the best one.
  std::int64_t polish_iterations = 256;
  double projection_eta = 0x1p-30;
  double validation_tol = kDefaultValidationTol;

  double step() const;
  double gamma_value() const;
  double eps_value() const;
  double mu_value() const;
  double delta_value() const;
};

struct ConfigOverrides {
  std::optional<SolveMode> mode;
  std::optional<Rational> gamma;
  std::optional<Rational> eps;
  std::optional<Rational> mu;
  std::optional<Rational> step_scale;
  std::optional<std::int64_t> iterations;  // replaces T in faithful mode
  std::optional<std::int64_t> iteration_cap;
  std::optional<int> fixed_point_bits;     // 0 selects the default 32*ceil(log2 N)
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> polish_iterations;
  std::optional<double> validation_tol;
};

/// The worst-case iteration count ceil(4 ln(N) / (eps^3 delta)).
std::int64_t faithful_iteration_count(int n, const Rational& eps, const Rational& delta);

SolverConfig configure(const SdpInstance& sdp, const ConfigOverrides& overrides = {});

struct TraceRecord {
  std::int64_t t = 0;
  double beta = 0.0;
  std::string beta_exact;  // "num/den" in fixed-point mode
  std::optional<double> dual_objective;
  bool accepted = false;
};

/// Projection step for the current iterate.
struct ProjectionStep {
  ComplexMatrix projection;  // Pi_t on X ⊗ W
  ComplexMatrix phi_rho;     // Phi(rho_t)
  double beta = 0.0;
  std::optional<Rational> beta_exact;
  bool accept = false;       // beta_t <= eps
};

struct IterationState {
  std::int64_t t = 0;
  ComplexMatrix rho;    // on X ⊗ W ⊗ Y
  ComplexMatrix xi;     // on W
  ComplexMatrix accum;  // sum_{j<t} Pi_j / beta_j on X ⊗ W
  std::vector<TraceRecord> trace_log;
  std::optional<ProjectionStep> current;
};

IterationState initial_state(const SdpInstance& sdp);

/// Accept rule, inclusive at the boundary.
bool accept_rule(double beta, const SolverConfig& cfg);

/// Computes Pi_t and beta_t for state.t if not already cached.
const ProjectionStep& compute_projection(const SdpInstance& sdp, const SolverConfig& cfg,
                                         IterationState& state);

/// Primal certificate when beta_t <= eps.
std::optional<PrimalCandidate> check_accept(const SdpInstance& sdp, const SolverConfig& cfg,
                                            IterationState& state);

/// One multiplicative-weights update. Throws ContractViolation if beta_t <= eps.
IterationState iterate(const SdpInstance& sdp, const SolverConfig& cfg, IterationState state);

struct DualCertificate {
  DualCandidate candidate;
  double objective = 0.0;
  ValidationReport report;
};

std::optional<DualCertificate> extract_dual_certificate(const SdpInstance& sdp,
                                                        const SolverConfig& cfg,
                                                        const IterationState& state);

enum class Verdict { accept, reject, inconclusive };

struct SolveOutcome {
  Verdict verdict = Verdict::inconclusive;
  std::optional<PrimalCandidate> primal;
  std::optional<DualCandidate> dual;
  double objective = 0.0;
  ValidationReport report;
  std::int64_t iterations_used = 0;
  SolveMode mode = SolveMode::certified;
  std::string diagnostics;
  std::vector<TraceRecord> trace;
};

using TraceSink = std::function<void(const TraceRecord&)>;

SolveOutcome solve(const SdpInstance& sdp, const SolverConfig& cfg, const TraceSink& sink = {});

/// The operators W_t = exp(-s Phi*(accum)) and Z_t = exp(s Tr_X(accum)),
/// which the iteration never stores, in overflow-safe form.
struct PotentialSnapshot {
  double log_trace_w = 0.0;
  double log_trace_z = 0.0;
  ComplexMatrix w_normalized;
  ComplexMatrix z_normalized;
};

PotentialSnapshot reconstruct_potentials(const SdpInstance& sdp, const SolverConfig& cfg,
                                         const ComplexMatrix& accum, double eta = 1e-13);

const char* to_string(Verdict v);
const char* to_string(SolveMode m);
SolveMode parse_mode(const std::string& s);

}  // namespace qmam
