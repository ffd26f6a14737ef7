// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "properties.hpp"
#include "qmam/generators.hpp"
#include "qmam/io.hpp"
#include "qmam/oracle.hpp"
#include "qmam/solver.hpp"

using namespace qmam;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail, Clock::time_point start) {
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%s criterion %d: %s (%s; %.1fs)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Solved {
  ProtocolInstance instance;
  SdpInstance sdp;
  SolveOutcome outcome;
  double primal = -1.0;  // validated objectives, -1 / 2 when absent
  double dual = 2.0;
};

Solved run_padded(const GeneratedInstance& g) {
  Solved s;
  s.instance = apply_soundness_padding(g.instance, kDefaultPaddingEps);
  s.sdp = assemble(s.instance);
  s.outcome = solve(s.sdp, configure(s.sdp));
  if (s.outcome.primal) {
    const ValidationReport r = validate_primal(s.sdp, *s.outcome.primal, 1e-8);
    if (r.feasible) s.primal = r.objective;
  }
  if (s.outcome.dual) {
    const ValidationReport r = validate_dual(s.sdp, *s.outcome.dual, 1e-8);
    if (r.feasible) s.dual = r.objective;
  }
  return s;
}

const std::vector<std::pair<int, int>> kDims{{2, 2}, {2, 3}, {2, 4}, {3, 3}, {3, 4}, {4, 4}};

}  // namespace

int main() {
  std::vector<Solved> produced;

  {  // 1
    const auto start = Clock::now();
    int accepted = 0;
    double min_obj = 1.0;
    for (int i = 0; i < 20; ++i) {
      const auto [dw, dy] = kDims[i % kDims.size()];
      Solved s = run_padded(gen_planted_yes(dw, dy, 1000 + i));
      if (s.outcome.verdict == Verdict::accept && s.primal > 5.0 / 8) ++accepted;
      min_obj = std::min(min_obj, s.primal);
      produced.push_back(std::move(s));
    }
    report(1, accepted == 20, "planted-yes suite accepts with revalidated primal certificates",
           std::to_string(accepted) + "/20 accepted, min objective " + fmt("%.6f", min_obj), start);
  }

  {  // 2
    const auto start = Clock::now();
    int rejected = 0;
    double best = 2.0;
    double worst_constraint = 1.0;
    for (int i = 0; i < 20; ++i) {
      const auto [dw, dy] = kDims[i % kDims.size()];
      const int k = 1 + i % (dw - 1);
      Solved s = run_padded(gen_planted_no(dw, dy, k, 2000 + i));
      if (s.outcome.dual) {
        worst_constraint = std::min(worst_constraint, lambda_min(phi_adjoint(s.sdp, s.outcome.dual->y)) - 1.0);
      }
      if (s.outcome.verdict == Verdict::reject && s.dual < 7.0 / 8) ++rejected;
      best = std::min(best, std::abs(s.dual - 0.53125));
      produced.push_back(std::move(s));
    }
    const bool ok = rejected == 20 && worst_constraint >= -1e-8 && best <= 1e-2;
    report(2, ok, "planted-no suite rejects with revalidated dual certificates",
           std::to_string(rejected) + "/20 rejected, min lambda_min(Phi*(Y)) - 1 = " + fmt("%.2e", worst_constraint) +
               ", closest objective within " + fmt("%.2e", best) + " of 0.53125",
           start);
  }

  {  // 3
    const auto start = Clock::now();
    Solved s;
    s.instance = scalar_instance(2, 2).instance;
    s.sdp = assemble(s.instance);
    s.outcome = solve(s.sdp, configure(s.sdp));
    const double expected = 1.0 / (4.0 / 3 + 0x1p-10);
    if (s.outcome.primal) {
      const ValidationReport r = validate_primal(s.sdp, *s.outcome.primal, 1e-8);
      if (r.feasible) s.primal = r.objective;
    }
    const bool ok = s.outcome.verdict == Verdict::accept && s.outcome.iterations_used == 0 &&
                    !s.outcome.trace.empty() && s.outcome.trace[0].beta == 0.0 &&
                    std::abs(s.primal - expected) <= 1e-9;
    report(3, ok, "scalar instance accepts at iteration 0",
           "objective " + fmt("%.12f", s.primal) + " vs " + fmt("%.12f", expected), start);
    produced.push_back(std::move(s));
  }

  {  // 4
    const auto start = Clock::now();
    Rng rng(4004);
    double gt = 1e300, coin = 1e300, twirl = 0.0, sandwich = 1e300;
    for (int i = 0; i < 500; ++i) gt = std::min(gt, testing::golden_thompson_slack(rng));
    for (int i = 0; i < 500; ++i) {
      const testing::CoinBoundTrial t = testing::coin_bound_trial(rng);
      coin = std::min(coin, t.slack);
      twirl = std::max(twirl, t.twirl_error);
    }
    for (double eta : {0.25, 1.0, 3.0}) {
      for (int i = 0; i < 500; ++i) {
        const testing::ExpSandwichTrial t = testing::exp_sandwich_trial(rng, eta);
        sandwich = std::min({sandwich, t.upper_slack, t.lower_slack});
      }
    }
    const bool ok = gt >= -1e-9 && coin >= -1e-9 && twirl <= 1e-10 && sandwich >= -1e-9;
    report(4, ok, "coin register bound, exponential bounds and Golden-Thompson over 500 trials each",
           "min slacks GT " + fmt("%.2e", gt) + ", coin " + fmt("%.2e", coin) + ", exp " + fmt("%.2e", sandwich) +
               "; twirl error " + fmt("%.2e", twirl),
           start);
  }

  {  // 5
    const auto start = Clock::now();
    Rng rng(5005);
    const double eta = 0x1p-30;
    double exp_err = 0.0, residual = 0.0, adjoint = 0.0;
    for (int i = 0; i < 200; ++i) exp_err = std::max(exp_err, testing::exp_error(rng));
    for (int i = 0; i < 200; ++i) residual = std::max(residual, testing::decomposition_trial(rng, eta).residual);
    for (int i = 0; i < 200; ++i) adjoint = std::max(adjoint, testing::adjoint_relative_error(rng));
    const bool ok = exp_err < eta && residual < eta && adjoint <= 1e-10;
    report(5, ok, "kernel contracts over 200 trials each",
           "max exp error " + fmt("%.2e", exp_err) + ", max residual " + fmt("%.2e", residual) +
               ", max adjoint error " + fmt("%.2e", adjoint),
           start);
  }

  {  // 6
    const auto start = Clock::now();
    double w = 1e300, z = 1e300;
    int iterations = 0;
    for (int i = 0; i < 5; ++i) {
      const ProtocolInstance inst = apply_soundness_padding(gen_planted_no(2, 2, 1, 6000 + i).instance, kDefaultPaddingEps);
      const testing::PotentialReport rep = testing::potential_run(assemble(inst), 200);
      w = std::min(w, rep.w_slack);
      z = std::min(z, rep.z_slack);
      iterations += rep.iterations;
    }
    report(6, w >= -1e-7 && z >= -1e-7 && iterations > 0, "potential inequalities with reconstructed W_t and Z_t",
           std::to_string(iterations) + " steps, min slack W " + fmt("%.2e", w) + ", Z " + fmt("%.2e", z), start);
  }

  {  // 7
    const auto start = Clock::now();
    int violations = 0;
    double worst_gap = -1e300;
    for (const Solved& s : produced) {
      BracketExtras extras;
      if (s.outcome.dual) extras.duals.push_back(*s.outcome.dual);
      const ValueBracket b = bracket(s.instance, s.sdp, 100, 7007, extras);
      worst_gap = std::max({worst_gap, b.lower - b.upper, s.primal - b.upper, s.primal - s.dual});
      if (b.lower > b.upper + 1e-8 || s.primal > b.upper + 1e-8 || s.primal > s.dual + 1e-8) ++violations;
    }
    report(7, violations == 0, "weak-duality sandwich on every certificate and bracket",
           std::to_string(produced.size()) + " instances, max lower - upper " + fmt("%.2e", worst_gap), start);
  }

  {  // 8
    const auto start = Clock::now();
    const ProtocolInstance inst = apply_soundness_padding(gen_planted_no(2, 2, 1, 8008).instance, kDefaultPaddingEps);
    const SdpInstance sdp = assemble(inst);
    ConfigOverrides o;
    o.fixed_point_bits = default_fixed_point_bits(sdp.dims.N());
    o.mu = Rational(1, 1024);
    o.seed = 8008;
    const SolverConfig cfg = configure(sdp, o);
    auto run = [&] {
      std::string trace;
      const SolveOutcome out = solve(sdp, cfg, [&](const TraceRecord& r) { trace += trace_line(r) + "\n"; });
      return std::pair{trace, out.verdict == Verdict::inconclusive
                                  ? std::string()
                                  : serialize_certificate(make_certificate_file(out, cfg, sdp.dims))};
    };
    const auto a = run();
    const auto b = run();
    const SolveOutcome fixed = solve(sdp, cfg);
    const SolveOutcome floating = solve(sdp, configure(sdp));
    const bool ok = a == b && !a.second.empty() && fixed.verdict == floating.verdict;
    report(8, ok, "fixed-point runs are bit-identical and match the float verdict",
           "K = " + std::to_string(*cfg.fixed_point_bits) + ", " + std::to_string(a.first.size()) +
               " trace bytes, verdict " + to_string(fixed.verdict),
           start);
  }

  {  // 9
    const auto start = Clock::now();
    ConfigOverrides o;
    o.mode = SolveMode::faithful;
    // P0 = P1 = 0 padded: Q = 1/32, ||Q^-1|| = 32. T values from an
    // independent 60-digit evaluation.
    struct Case {
      GeneratedInstance g;
      Rational delta;
      std::int64_t T;
    };
    const std::vector<Case> cases{
        {gen_random(2, 2, 0, 0, 1), Rational(1, 4096), 8931133416LL},
        {gen_random(4, 4, 0, 0, 1), Rational(1, 4096), 14885222360LL},
        {gen_random(2, 2, 4, 4, 1), Rational(1, 256), 558195839LL},
    };
    bool ok = true;
    std::string detail;
    for (const Case& c : cases) {
      const SdpInstance sdp = assemble(apply_soundness_padding(c.g.instance, kDefaultPaddingEps));
      const SolverConfig cfg = configure(sdp, o);
      const bool good = cfg.gamma == Rational(4, 3) && cfg.eps == Rational(1, 64) && cfg.delta == c.delta &&
                        cfg.delta == cfg.eps / (2 * exact_rational(sdp.qinv_norm)) && cfg.T == c.T;
      ok = ok && good;
      detail += (detail.empty() ? "" : ", ") + std::string("N = ") + std::to_string(sdp.dims.N()) +
                ": T = " + std::to_string(cfg.T);
    }
    report(9, ok, "faithful-mode constants are exact", detail, start);
  }

  return failures == 0 ? 0 : 1;
}
