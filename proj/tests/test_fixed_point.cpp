#include <cmath>

#include "doctest.h"

#include "qmam/errors.hpp"
#include "qmam/fixed_point.hpp"
#include "qmam/generators.hpp"
#include "qmam/io.hpp"
#include "qmam/solver.hpp"

using namespace qmam;

namespace {

ComplexMatrix scalar(double re, double im = 0.0) {
  ComplexMatrix m(1, 1);
  m(0, 0) = Complex(re, im);
  return m;
}

}  // namespace

TEST_SUITE("fixed_point") {

TEST_CASE("rounding examples") {
  CHECK(fixed_point_round(scalar(0.3), 4)(0, 0).real() == 0.3125);
  CHECK(fixed_point_round(scalar(0.8125, -0.25), 4)(0, 0) == Complex(0.8125, -0.25));
  CHECK(fixed_point_round(scalar(3.0 / 32), 4)(0, 0).real() == 0.125);
  CHECK(fixed_point_round(scalar(1.0 / 32), 4)(0, 0).real() == 0.0);
  CHECK(fixed_point_round(scalar(-3.0 / 32), 4)(0, 0).real() == -0.125);
  CHECK_THROWS_AS(fixed_point_round(scalar(1.25), 4), PreconditionError);
  CHECK_NOTHROW(fixed_point_round(scalar(1.0 + 1.0 / 32), 4));
}

TEST_CASE("default bit count") {
  CHECK(default_fixed_point_bits(8) == 96);
  CHECK(default_fixed_point_bits(12) == 128);
  CHECK(default_fixed_point_bits(32) == 160);
}

TEST_CASE("exact rationals from doubles") {
  CHECK(exact_rational(0.75) == Rational(3, 4));
  CHECK(exact_rational(-0x1p-60) == Rational(-1) / Rational(BigInt(1) << 60));
  CHECK(exact_rational(0.1) != Rational(1, 10));
  CHECK(exact_rational(0.1).convert_to<double>() == 0.1);
}

TEST_CASE("exact beta agrees with the float value") {
  const SdpInstance sdp = assemble(apply_soundness_padding(gen_planted_no(2, 2, 1, 4).instance, 1.0 / 64));
  ConfigOverrides o;
  o.fixed_point_bits = 0;
  const SolverConfig cfg = configure(sdp, o);
  REQUIRE(cfg.fixed_point_bits);
  CHECK(*cfg.fixed_point_bits == 96);
  CHECK(cfg.validation_tol == doctest::Approx(0x1p-10 / 2));
  IterationState st = initial_state(sdp);
  const ProjectionStep& step = compute_projection(sdp, cfg, st);
  REQUIRE(step.beta_exact);
  CHECK(std::abs(step.beta_exact->convert_to<double>() - step.beta) <= 1e-12);
  CHECK(exact_beta(sdp, step.projection, st.rho) == *step.beta_exact);
}

TEST_CASE("fixed-point runs are bit-identical") {
  const SdpInstance sdp = assemble(apply_soundness_padding(gen_planted_no(2, 2, 1, 6).instance, 1.0 / 64));
  ConfigOverrides o;
  o.fixed_point_bits = 0;
  o.seed = 99;
  const SolverConfig cfg = configure(sdp, o);
  const SolveOutcome a = solve(sdp, cfg);
  const SolveOutcome b = solve(sdp, cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(trace_line(a.trace[i]) == trace_line(b.trace[i]));
  CHECK(serialize_certificate(make_certificate_file(a, cfg, sdp.dims)) ==
        serialize_certificate(make_certificate_file(b, cfg, sdp.dims)));
  CHECK(a.verdict == solve(sdp, configure(sdp)).verdict);
}

}  // TEST_SUITE
