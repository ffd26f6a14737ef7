#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qmam/errors.hpp"
#include "qmam/generators.hpp"
#include "qmam/io.hpp"
#include "qmam/oracle.hpp"
#include "qmam/sdp.hpp"
#include "qmam/solver.hpp"

namespace qmam::cli {

namespace {

// "3/64", "7" or "0.125", read exactly.
Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const BigInt num(text.substr(0, slash));
      const BigInt den(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator");
      return Rational(num, den);
    }
    parse_decimal(text, "rational");
    const auto exp_pos = text.find_first_of("eE");
    std::string mantissa = text.substr(0, exp_pos);
    long exponent = exp_pos == std::string::npos ? 0 : std::stol(text.substr(exp_pos + 1));
    if (const auto dot = mantissa.find('.'); dot != std::string::npos) {
      exponent -= static_cast<long>(mantissa.size() - dot - 1);
      mantissa.erase(dot, 1);
    }
    if (exponent < -400 || exponent > 400) throw std::invalid_argument("exponent out of range");
    Rational r{BigInt(mantissa)};
    const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
    if (exponent >= 0) return Rational(r * scale);
    return Rational(r / scale);
  } catch (const FormatError&) {
    throw CLI::ValidationError("'" + text + "' is not a rational number");
  } catch (const std::exception&) {
    throw CLI::ValidationError("'" + text + "' is not a rational number");
  }
}

struct Loaded {
  InstanceFile file;
  ProtocolInstance instance;
  SdpInstance sdp;
};

Loaded load_instance(const std::string& path) {
  Loaded l;
  try {
    l.file = parse_instance(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.where(), e.reason());
  }
  l.instance = to_protocol_instance(l.file);
  revalidate_witnesses(l.file);
  l.sdp = assemble(l.instance);
  return l;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

struct GenArgs {
  std::string planted;
  std::string kind;
  int dw = 2;
  int dy = 2;
  int k = 1;
  int rank0 = -1;
  int rank1 = -1;
  std::uint64_t seed = 0;
  std::string pad_eps = "1/64";
  int bracket_samples = 200;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  std::string kind = a.kind;
  if (!a.planted.empty()) {
    if (!kind.empty() && kind != a.planted) throw CLI::ValidationError("--planted and --kind disagree");
    kind = a.planted;
  }
  if (kind.empty()) throw CLI::ValidationError("one of --planted or --kind is required");

  GeneratedInstance g;
  if (kind == "yes") {
    g = gen_planted_yes(a.dw, a.dy, a.seed);
  } else if (kind == "no") {
    g = gen_planted_no(a.dw, a.dy, a.k, a.seed);
  } else if (kind == "random") {
    const int full = a.dw * a.dy;
    g = gen_random(a.dw, a.dy, a.rank0 < 0 ? full / 2 : a.rank0, a.rank1 < 0 ? full / 2 : a.rank1,
                   a.seed);
  } else if (kind == "scalar") {
    g = scalar_instance(a.dw, a.dy);
  } else if (kind == "bell") {
    g = bell_planted_yes();
  } else {
    throw CLI::ValidationError("unknown instance kind '" + kind + "'");
  }

  const Rational pad = parse_rational(a.pad_eps);
  if (pad < 0 || 4 * pad > 1) throw CLI::ValidationError("--pad-eps must lie in [0, 1/4]");
  InstanceFile f = make_instance_file(g, boost::multiprecision::numerator(pad).convert_to<std::int64_t>(),
                                      boost::multiprecision::denominator(pad).convert_to<std::int64_t>());
  if (kind == "random" && a.bracket_samples > 0) {
    const ProtocolInstance inst = to_protocol_instance(f);
    try {
      const SdpInstance sdp = assemble(inst);
      const ValueBracket b = bracket(inst, sdp, a.bracket_samples, a.seed);
      f.oracle_bracket = std::pair{format_decimal(b.lower), format_decimal(b.upper)};
    } catch (const PreconditionError&) {
      // Unpadded singular Q: no bracket without the program.
    }
  }
  emit(a.out, serialize_instance(f), out);
  return kOk;
}

struct SolveArgs {
  std::string instance;
  std::string mode;
  std::optional<int> fixed_point;
  std::string mu;
  std::string step_scale;
  std::optional<std::int64_t> cap;
  std::optional<std::int64_t> iterations;
  std::optional<std::int64_t> polish;
  std::optional<std::uint64_t> seed;
  std::string trace;
  std::string cert;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Loaded l = load_instance(a.instance);
  ConfigOverrides o;
  if (!a.mode.empty()) o.mode = parse_mode(a.mode);
  if (a.fixed_point) o.fixed_point_bits = *a.fixed_point;
  if (!a.mu.empty()) o.mu = parse_rational(a.mu);
  if (!a.step_scale.empty()) o.step_scale = parse_rational(a.step_scale);
  o.iteration_cap = a.cap;
  o.iterations = a.iterations;
  o.polish_iterations = a.polish;
  o.seed = a.seed;
  const SolverConfig cfg = configure(l.sdp, o);

  std::unique_ptr<std::ofstream> trace;
  if (!a.trace.empty()) {
    trace = std::make_unique<std::ofstream>(a.trace, std::ios::binary);
    if (!*trace) throw Error("cannot write " + a.trace);
  }
  TraceSink sink;
  if (trace) sink = [&](const TraceRecord& r) { *trace << trace_line(r) << '\n'; };

  const SolveOutcome outcome = solve(l.sdp, cfg, sink);
  out << "verdict: " << to_string(outcome.verdict) << '\n';
  out << "mode: " << to_string(outcome.mode) << '\n';
  out << "iterations: " << outcome.iterations_used << '\n';
  if (outcome.verdict != Verdict::inconclusive) {
    out << "objective: " << format_decimal(outcome.objective) << '\n';
    out << "worst_violation: " << format_decimal(outcome.report.worst_violation) << '\n';
    if (!a.cert.empty()) {
      write_file(a.cert, serialize_certificate(make_certificate_file(outcome, cfg, l.sdp.dims)));
    }
  }
  if (!outcome.diagnostics.empty()) out << "diagnostics: " << outcome.diagnostics << '\n';
  return outcome.verdict == Verdict::inconclusive ? kInconclusive : kOk;
}

int cmd_validate(const std::string& inst_path, const std::string& cert_path,
                 std::optional<double> tol, std::ostream& out) {
  const Loaded l = load_instance(inst_path);
  CertificateFile cert;
  try {
    cert = parse_certificate(read_file(cert_path));
  } catch (const FormatError& e) {
    throw FormatError(cert_path + ": " + e.where(), e.reason());
  }
  const ValidationReport rep = revalidate_certificate(l.sdp, cert, tol);
  out << "kind: " << cert.kind << '\n';
  out << "feasible: " << (rep.feasible ? "yes" : "no") << '\n';
  out << "objective: " << format_decimal(rep.objective) << '\n';
  out << "worst_violation: " << format_decimal(rep.worst_violation) << '\n';
  if (!rep.detail.empty()) out << "detail: " << rep.detail << '\n';
  return rep.feasible ? kOk : kValidationFailure;
}

int cmd_oracle(const std::string& inst_path, int samples, std::uint64_t seed,
               const std::vector<std::string>& certs, const std::string& out_path,
               std::ostream& out) {
  const Loaded l = load_instance(inst_path);
  BracketExtras extras;
  if (l.file.witness) {
    extras.witnesses.push_back(Strategy{from_decimal(l.file.witness->first),
                                        from_decimal(l.file.witness->second)});
  }
  if (l.file.dual_witness) extras.duals.push_back(DualCandidate{from_decimal(*l.file.dual_witness)});
  for (const auto& path : certs) {
    const CertificateFile c = parse_certificate(read_file(path));
    if (c.y) extras.duals.push_back(DualCandidate{from_decimal(*c.y, "$.Y")});
  }
  const ValueBracket b = bracket(l.instance, l.sdp, samples, seed, extras);
  emit(out_path, bracket_report(b, closed_form_value(l.instance)), out);
  return b.lower <= b.upper + 1e-8 ? kOk : kValidationFailure;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-coin QMAM game solver"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate an instance file");
  g->add_option("--planted", gen.planted, "Planted instance")->check(CLI::IsMember({"yes", "no"}));
  g->add_option("--kind", gen.kind, "Instance kind")
      ->check(CLI::IsMember({"yes", "no", "random", "scalar", "bell"}));
  g->add_option("--dw", gen.dw, "Dimension of W")->check(CLI::PositiveNumber);
  g->add_option("--dy", gen.dy, "Dimension of Y")->check(CLI::PositiveNumber);
  g->add_option("--k", gen.k, "Projector rank for planted-no");
  g->add_option("--rank0", gen.rank0, "Rank of P0 for random instances");
  g->add_option("--rank1", gen.rank1, "Rank of P1 for random instances");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--pad-eps", gen.pad_eps, "Soundness padding eps (0 disables)");
  g->add_option("--bracket-samples", gen.bracket_samples, "Oracle samples for random instances");
  g->add_option("--out", gen.out, "Output path (stdout if omitted)");

  SolveArgs sv;
  auto* s = app.add_subcommand("solve", "Run the solver on an instance");
  s->add_option("instance", sv.instance, "Instance file")->required();
  s->add_option("--mode", sv.mode, "faithful or certified")
      ->check(CLI::IsMember({"faithful", "certified"}));
  s->add_option("--fixed-point", sv.fixed_point, "Fixed-point bits K (0 for the default)");
  s->add_option("--mu", sv.mu, "Precision parameter mu");
  s->add_option("--step-scale", sv.step_scale, "Multiplier on eps*delta");
  s->add_option("--cap", sv.cap, "Iteration cap (certified mode)");
  s->add_option("--iterations", sv.iterations, "Replace T (faithful mode)");
  s->add_option("--polish", sv.polish, "Extra iterations after the first reject certificate");
  s->add_option("--seed", sv.seed, "Seed recorded in the certificate");
  s->add_option("--trace", sv.trace, "Per-iteration trace (JSON lines)");
  s->add_option("--cert", sv.cert, "Certificate output path");

  std::string v_inst;
  std::string v_cert;
  std::optional<double> v_tol;
  auto* v = app.add_subcommand("validate", "Revalidate a certificate");
  v->add_option("instance", v_inst, "Instance file")->required();
  v->add_option("certificate", v_cert, "Certificate file")->required();
  v->add_option("--tol", v_tol, "Tolerance (default: the certificate's)");

  std::string o_inst;
  int o_samples = 2000;
  std::uint64_t o_seed = 0;
  std::vector<std::string> o_certs;
  std::string o_out;
  auto* o = app.add_subcommand("oracle", "Bracket the game value");
  o->add_option("instance", o_inst, "Instance file")->required();
  o->add_option("--samples", o_samples, "Random strategies sampled")->check(CLI::NonNegativeNumber);
  o->add_option("--seed", o_seed, "Seed");
  o->add_option("--cert", o_certs, "Certificates whose duals join the upper bound");
  o->add_option("--out", o_out, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_gen(gen, out);
    if (*s) return cmd_solve(sv, out);
    if (*v) return cmd_validate(v_inst, v_cert, v_tol, out);
    if (*o) return cmd_oracle(o_inst, o_samples, o_seed, o_certs, o_out, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    err << "malformed input: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

int run_cli(int argc, char** argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace qmam::cli
