#include <cmath>

#include "doctest.h"

#include "qmam/errors.hpp"
#include "qmam/generators.hpp"
#include "qmam/oracle.hpp"
#include "qmam/random.hpp"
#include "qmam/solver.hpp"

using namespace qmam;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

ProtocolInstance make(int dW, int dY, ComplexMatrix p0, ComplexMatrix p1) {
  ProtocolInstance inst;
  inst.dims = {dW, dY};
  inst.p0 = std::move(p0);
  inst.p1 = std::move(p1);
  return inst;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("closed forms for degenerate dimensions") {
  const ProtocolInstance w1 = make(1, 2, diag2(1, 0), diag2(0, 1));
  REQUIRE(closed_form_value(w1));
  CHECK(*closed_form_value(w1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(random_search_lower_bound(w1, 200, 1).value >= 1.0 - 1e-3);

  const ProtocolInstance y1 = make(2, 1, diag2(1, 0), diag2(0, 1));
  REQUIRE(closed_form_value(y1));
  CHECK(*closed_form_value(y1) == doctest::Approx(0.5).epsilon(1e-12));

  const ProtocolInstance no = gen_planted_no(3, 2, 2, 5).instance;
  REQUIRE(closed_form_value(no));
  CHECK(*closed_form_value(no) == 0.5);
  const ProtocolInstance padded = apply_soundness_padding(no, 1.0 / 64);
  CHECK(*closed_form_value(padded) == doctest::Approx(0.53125).epsilon(1e-12));

  CHECK_FALSE(closed_form_value(gen_planted_yes(2, 2, 3).instance));
}

TEST_CASE("dY = 1 closed form against a dual and the sampler") {
  const ProtocolInstance y1 = apply_soundness_padding(make(2, 1, diag2(1, 0), diag2(0, 1)), 1.0 / 64);
  const SdpInstance sdp = assemble(y1);
  const ValueBracket b = bracket(y1, sdp, 400, 2);
  const double v = *closed_form_value(y1);
  CHECK(b.lower <= v + 1e-9);
  CHECK(b.lower >= v - 1e-3);
  // Y = 1/2 |0><0| (x) P0 + 1/2 |1><1| (x) P1 completed to feasibility by
  // the max eigenvalue of the average: here Y_a = v 1 on each block.
  ComplexMatrix y = ComplexMatrix::Zero(4, 4);
  y.topLeftCorner(2, 2) = 0.5 * y1.p0;
  y.bottomRightCorner(2, 2) = 0.5 * y1.p1;
  const ValidationReport rep = validate_dual(sdp, DualCandidate{y});
  CHECK(rep.feasible);
  CHECK(rep.objective == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("planted-no optimal dual") {
  for (int k : {1, 2, 3}) {
    const ProtocolInstance inst = apply_soundness_padding(gen_planted_no(4, 2, k, 10 + k).instance, 1.0 / 64);
    const DualCandidate y = optimal_dual_for_planted_no(inst);
    const ValidationReport rep = validate_dual(assemble(inst), y);
    CHECK(rep.feasible);
    CHECK(std::abs(rep.objective - 0.53125) < 1e-12);
    const ValidationReport unscaled = validate_dual_unscaled(inst, y);
    CHECK(unscaled.feasible);
  }
  const ProtocolInstance raw = gen_planted_no(2, 2, 1, 1).instance;
  CHECK(validate_dual_unscaled(raw, optimal_dual_for_planted_no(raw)).objective ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS(optimal_dual_for_planted_no(gen_planted_yes(2, 2, 1).instance));
}

TEST_CASE("planted-no with the full projector") {
  // k = dW: P0 = 1, P1 = 0.
  ProtocolInstance inst = make(2, 2, identity(4), ComplexMatrix::Zero(4, 4));
  inst = apply_soundness_padding(inst, 1.0 / 64);
  const DualCandidate y = optimal_dual_for_planted_no(inst);
  const ValidationReport rep = validate_dual(assemble(inst), y);
  CHECK(rep.feasible);
  CHECK(rep.objective == doctest::Approx(0.53125).epsilon(1e-12));
}

TEST_CASE("sampler on planted instances") {
  const ProtocolInstance no = gen_planted_no(2, 3, 1, 4).instance;
  for (int s : {1, 5, 20}) {
    CHECK(std::abs(random_search_lower_bound(no, s, 8).value - 0.5) <= 1e-9);
  }
  const ProtocolInstance full = scalar_instance(2, 2).instance;
  CHECK(random_search_lower_bound(full, 1, 3).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(random_search_lower_bound(make(2, 1, diag2(1, 0), diag2(0, 1)), 5, 1),
                  PreconditionError);
}

TEST_CASE("sampler is monotone and deterministic") {
  const ProtocolInstance inst = gen_random(2, 2, 2, 2, 17).instance;
  double last = -1.0;
  for (int s : {1, 2, 5, 10, 40}) {
    const double v = random_search_lower_bound(inst, s, 4).value;
    CHECK(v >= last);
    last = v;
  }
  CHECK(random_search_lower_bound(inst, 40, 4).value == last);
}

TEST_CASE("sampled strategies agree on W") {
  const ProtocolInstance inst = gen_random(3, 3, 4, 5, 2).instance;
  const LowerBound lb = random_search_lower_bound(inst, 10, 6);
  CHECK_NOTHROW(strategy_value(inst, lb.witness.rho0, lb.witness.rho1, 1e-9));
}

TEST_CASE("Bell instance sampler reaches 0.95") {
  const LowerBound lb = random_search_lower_bound(bell_planted_yes().instance, 10000, 1);
  CHECK(lb.value >= 0.95);
}

TEST_CASE("brackets") {
  const ProtocolInstance no = apply_soundness_padding(gen_planted_no(2, 2, 1, 3).instance, 1.0 / 64);
  const ValueBracket b = bracket(no, assemble(no), 50, 1);
  CHECK(b.lower >= 0.53125 - 1e-9);
  CHECK(b.upper <= 0.53125 + 1e-9);

  const ProtocolInstance yes = apply_soundness_padding(gen_planted_yes(2, 2, 3).instance, 1.0 / 64);
  const ValueBracket y = bracket(yes, assemble(yes), 2000, 1);
  CHECK(y.lower >= 0.95);
  CHECK(y.upper == doctest::Approx(1.0).epsilon(1e-12));

  const ProtocolInstance w1 = apply_soundness_padding(make(1, 2, diag2(1, 0), diag2(0.5, 0.2)), 1.0 / 64);
  const ValueBracket b1 = bracket(w1, assemble(w1), 300, 1);
  const double v = *closed_form_value(w1);
  CHECK(b1.lower <= v + 1e-3);
  CHECK(b1.upper >= v - 1e-3);
  CHECK(b1.lower >= v - 1e-3);

  const ProtocolInstance rnd = apply_soundness_padding(gen_random(2, 2, 2, 2, 11).instance, 1.0 / 64);
  const ValueBracket br = bracket(rnd, assemble(rnd), 200, 3);
  CHECK(br.lower <= br.upper + 1e-8);
}

TEST_CASE("bracket pads Y when it is smaller than W") {
  const ProtocolInstance inst = apply_soundness_padding(gen_random(3, 2, 3, 3, 5).instance, 1.0 / 64);
  const ValueBracket b = bracket(inst, assemble(inst), 50, 2);
  CHECK(b.lower <= b.upper + 1e-8);
  CHECK(b.lower > 0.0);
}

TEST_CASE("solver verdicts agree with brackets") {
  const ProtocolInstance yes = apply_soundness_padding(gen_planted_yes(3, 3, 5).instance, 1.0 / 64);
  const SdpInstance sy = assemble(yes);
  const SolveOutcome oy = solve(sy, configure(sy));
  CHECK(oy.verdict == Verdict::accept);
  CHECK(bracket(yes, sy, 200, 1).upper > 5.0 / 8);

  const ProtocolInstance no = apply_soundness_padding(gen_planted_no(3, 3, 1, 5).instance, 1.0 / 64);
  const SdpInstance sn = assemble(no);
  const SolveOutcome on = solve(sn, configure(sn));
  REQUIRE(on.verdict == Verdict::reject);
  BracketExtras extras;
  extras.duals.push_back(*on.dual);
  const ValueBracket b = bracket(no, sn, 100, 1, extras);
  CHECK(b.lower < 7.0 / 8);
  CHECK(b.lower <= b.upper + 1e-8);
}

}  // TEST_SUITE
