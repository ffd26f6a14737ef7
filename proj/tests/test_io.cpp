#include <cmath>

#include "doctest.h"

#include "json.hpp"

#include "qmam/generators.hpp"
#include "qmam/io.hpp"
#include "qmam/random.hpp"

using namespace qmam;
using nlohmann::json;

TEST_SUITE("io") {

TEST_CASE("decimal strings round-trip doubles exactly") {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.gaussian(), static_cast<int>(rng.uniform() * 40) - 20);
    CHECK(parse_decimal(format_decimal(x)) == x);
  }
  CHECK(format_decimal(0.5) == "0.5");
  CHECK(parse_decimal("1e-3") == 0.001);
  CHECK(parse_decimal("0.1000000000000000055511151231257827") == 0.1);
  CHECK_THROWS_AS(parse_decimal("0x1p3"), FormatError);
  CHECK_THROWS_AS(parse_decimal("1.5.2"), FormatError);
  CHECK_THROWS_AS(parse_decimal("nan"), FormatError);
  CHECK_THROWS_AS(parse_decimal(" 1"), FormatError);
}

TEST_CASE("matrices round-trip through decimal form") {
  Rng rng(32);
  const ComplexMatrix a = gaussian_matrix(5, 5, rng);
  CHECK((from_decimal(to_decimal(a)) - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("instance files round-trip") {
  for (const GeneratedInstance& g :
       {gen_planted_yes(2, 3, 4), gen_planted_no(3, 2, 1, 5), gen_random(2, 2, 1, 3, 6), bell_planted_yes()}) {
    const InstanceFile f = make_instance_file(g);
    const std::string text = serialize_instance(f);
    const InstanceFile back = parse_instance(text);
    CHECK(serialize_instance(back) == text);
    CHECK(back.p0.entries == f.p0.entries);
    CHECK(back.p1.entries == f.p1.entries);
    const ProtocolInstance inst = to_protocol_instance(back);
    CHECK(inst.padded);
    CHECK((inst.p0 - apply_soundness_padding(g.instance, 1.0 / 64).p0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_NOTHROW(revalidate_witnesses(back));
  }
}

TEST_CASE("known values are stored after padding") {
  const InstanceFile no = make_instance_file(gen_planted_no(2, 2, 1, 7));
  REQUIRE(no.known_value);
  CHECK(no.known_value->first == 17);
  CHECK(no.known_value->second == 32);
  CHECK(no.dual_witness);
  const InstanceFile zero = make_instance_file(gen_random(2, 2, 0, 0, 1));
  REQUIRE(zero.known_value);
  CHECK(zero.known_value->first == 1);
  CHECK(zero.known_value->second == 16);
  const InstanceFile unpadded = make_instance_file(gen_planted_no(2, 2, 1, 7), 0, 1);
  CHECK(unpadded.known_value->first == 1);
  CHECK(unpadded.known_value->second == 2);
  CHECK_FALSE(to_protocol_instance(unpadded).padded);
}

TEST_CASE("header and ordering are recorded") {
  const json doc = json::parse(serialize_instance(make_instance_file(bell_planted_yes())));
  CHECK(doc["format"] == "qmam-instance");
  CHECK(doc["format_version"] == 1);
  CHECK(doc["index_convention"].get<std::string>().find("a*(dW*dY) + w*dY + y") != std::string::npos);
  // psi0 = (|00> + |11>)/sqrt2: P0[0][3] = 1/2.
  CHECK(parse_decimal(doc["P0"]["entries"][3][0].get<std::string>()) == doctest::Approx(0.5));
  CHECK(parse_decimal(doc["P0"]["entries"][1][0].get<std::string>()) == 0.0);
}

TEST_CASE("malformed instances name the fault") {
  const std::string good = serialize_instance(make_instance_file(gen_planted_no(2, 2, 1, 2)));

  CHECK_THROWS_WITH_AS(parse_instance(good.substr(0, good.size() / 2)), doctest::Contains("line"),
                       FormatError);

  json doc = json::parse(good);
  doc["P0"]["entries"][2][1] = "1.2.3";
  CHECK_THROWS_WITH_AS(parse_instance(doc.dump()), doctest::Contains("$.P0.entries[2][1]"), FormatError);

  doc = json::parse(good);
  doc["P1"]["entries"].erase(0);
  CHECK_THROWS_WITH_AS(parse_instance(doc.dump()), doctest::Contains("$.P1.entries"), FormatError);

  doc = json::parse(good);
  doc.erase("dims");
  CHECK_THROWS_WITH_AS(parse_instance(doc.dump()), doctest::Contains("$.dims"), FormatError);

  doc = json::parse(good);
  doc["format_version"] = 7;
  CHECK_THROWS_WITH_AS(parse_instance(doc.dump()), doctest::Contains("format_version"), FormatError);

  doc = json::parse(good);
  doc["P0"]["entries"][0][0] = "2";
  CHECK_THROWS_AS(to_protocol_instance(parse_instance(doc.dump())), FormatError);
}

TEST_CASE("tampered witnesses fail revalidation") {
  json doc = json::parse(serialize_instance(make_instance_file(gen_planted_yes(2, 2, 3))));
  doc["metadata"]["known_value"] = json::array({3, 4});
  CHECK_THROWS_AS(revalidate_witnesses(parse_instance(doc.dump())), FormatError);
}

TEST_CASE("certificates round-trip and revalidate") {
  const GeneratedInstance g = gen_planted_no(2, 2, 1, 9);
  const InstanceFile f = make_instance_file(g);
  const SdpInstance sdp = assemble(to_protocol_instance(f));
  const SolverConfig cfg = configure(sdp);
  const SolveOutcome out = solve(sdp, cfg);
  const CertificateFile c = make_certificate_file(out, cfg, sdp.dims);
  CHECK(c.kind == "dual");
  CHECK(c.solver.at("mode") == "certified");
  const std::string text = serialize_certificate(c);
  const CertificateFile back = parse_certificate(text);
  CHECK(serialize_certificate(back) == text);
  const ValidationReport rep = revalidate_certificate(sdp, back);
  CHECK(rep.feasible);
  CHECK(rep.objective == out.objective);

  CertificateFile lying = back;
  lying.claimed_objective = "0.5";
  CHECK_FALSE(revalidate_certificate(sdp, lying).feasible);

  json doc = json::parse(text);
  doc["kind"] = "both";
  CHECK_THROWS_WITH_AS(parse_certificate(doc.dump()), doctest::Contains("$.kind"), FormatError);
}

TEST_CASE("trace lines") {
  TraceRecord r;
  r.t = 3;
  r.beta = 0.25;
  r.beta_exact = "1/4";
  const json j = json::parse(trace_line(r));
  CHECK(j["t"] == 3);
  CHECK(j["beta"] == 0.25);
  CHECK(j["beta_exact"] == "1/4");
  CHECK(j["dual_objective"].is_null());
  CHECK(j["accepted"] == false);
  r.dual_objective = 0.6;
  CHECK(json::parse(trace_line(r))["dual_objective"] == 0.6);
}

}  // TEST_SUITE
