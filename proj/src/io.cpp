#include "qmam/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "qmam/errors.hpp"

namespace qmam {

using nlohmann::json;

namespace {

const std::regex& decimal_pattern() {
  static const std::regex pattern(R"(-?(0|[1-9][0-9]*)(\.[0-9]+)?([eE][-+]?[0-9]+)?)");
  return pattern;
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw FormatError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(path + "." + key, "missing field");
  return *it;
}

template <typename T>
T require_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) throw FormatError(path + "." + key, "expected an integer");
  return v.get<T>();
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw FormatError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

json matrix_json(const DecimalMatrix& m) {
  json entries = json::array();
  for (const auto& [re, im] : m.entries) entries.push_back(json::array({re, im}));
  return json{{"dim", m.dim}, {"entries", std::move(entries)}};
}

DecimalMatrix matrix_from_json(const json& j, const std::string& path) {
  DecimalMatrix m;
  m.dim = require_number<int>(j, "dim", path);
  if (m.dim < 1) throw FormatError(path + ".dim", "dimension must be positive");
  const json& entries = require(j, "entries", path);
  if (!entries.is_array()) throw FormatError(path + ".entries", "expected an array");
  const std::size_t expected = static_cast<std::size_t>(m.dim) * m.dim;
  if (entries.size() != expected) {
    std::ostringstream msg;
    msg << "expected " << expected << " entries, found " << entries.size();
    throw FormatError(path + ".entries", msg.str());
  }
  m.entries.reserve(expected);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = path + ".entries[" + std::to_string(i) + "]";
    const json& e = entries[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
      throw FormatError(where, "expected a pair of decimal strings [re, im]");
    }
    std::string re = e[0].get<std::string>();
    std::string im = e[1].get<std::string>();
    parse_decimal(re, where + "[0]");
    parse_decimal(im, where + "[1]");
    m.entries.emplace_back(std::move(re), std::move(im));
  }
  return m;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n');
    std::string what = e.what();
    if (const auto pos = what.find("] "); pos != std::string::npos) what = what.substr(pos + 2);
    throw FormatError("line " + std::to_string(line), what);
  }
}

void check_header(const json& doc, const std::string& expected_format) {
  const std::string format = require_string(doc, "format", "$");
  if (format != expected_format) {
    throw FormatError("$.format", "expected '" + expected_format + "', found '" + format + "'");
  }
  const int version = require_number<int>(doc, "format_version", "$");
  if (version != kFormatVersion) {
    throw FormatError("$.format_version", "unsupported version " + std::to_string(version));
  }
}

DimTriple dims_from_json(const json& doc) {
  const json& d = require(doc, "dims", "$");
  DimTriple dims{require_number<int>(d, "dW", "$.dims"), require_number<int>(d, "dY", "$.dims")};
  if (dims.dW < 1 || dims.dY < 1) throw FormatError("$.dims", "dimensions must be positive");
  return dims;
}

void expect_dim(const DecimalMatrix& m, int dim, const std::string& field) {
  if (m.dim != dim) {
    throw FormatError(field + ".dim", "expected " + std::to_string(dim) + ", found " +
                                          std::to_string(m.dim));
  }
}

std::string rational_text(const Rational& r) {
  std::ostringstream out;
  out << boost::multiprecision::numerator(r) << "/" << boost::multiprecision::denominator(r);
  return out.str();
}

}  // namespace

std::string format_decimal(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("format_decimal: non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_decimal(const std::string& s, const std::string& field) {
  if (!std::regex_match(s, decimal_pattern())) {
    throw FormatError(field, "'" + s + "' is not a decimal number");
  }
  // from_chars rounds correctly, i.e. to the double nearest the exact rational.
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw FormatError(field, "'" + s + "' is out of range");
  }
  return value;
}

DecimalMatrix to_decimal(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("to_decimal: matrix must be square");
  DecimalMatrix m;
  m.dim = static_cast<int>(a.rows());
  m.entries.reserve(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      m.entries.emplace_back(format_decimal(a(i, j).real()), format_decimal(a(i, j).imag()));
    }
  }
  return m;
}

ComplexMatrix from_decimal(const DecimalMatrix& m, const std::string& field) {
  ComplexMatrix a(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i) {
    for (int j = 0; j < m.dim; ++j) {
      const auto& [re, im] = m.entries[static_cast<std::size_t>(i) * m.dim + j];
      const std::string where = field + ".entries[" + std::to_string(i * m.dim + j) + "]";
      a(i, j) = Complex{parse_decimal(re, where), parse_decimal(im, where)};
    }
  }
  return a;
}

InstanceFile make_instance_file(const GeneratedInstance& g, std::int64_t pad_num,
                                std::int64_t pad_den) {
  if (pad_den <= 0 || pad_num < 0 || 4 * pad_num > pad_den) {
    throw PreconditionError("padding eps must be a rational in [0, 1/4]");
  }
  InstanceFile f;
  f.dims = g.instance.dims;
  f.padding_eps = {pad_num, pad_den};
  f.p0 = to_decimal(g.instance.p0);
  f.p1 = to_decimal(g.instance.p1);
  f.generator = g.generator;
  f.seed = g.seed;
  f.params = g.params;
  const Rational eps(pad_num, pad_den);
  if (g.known_value) {
    const Rational padded = 4 * eps + (1 - 4 * eps) * *g.known_value;
    f.known_value = std::pair{boost::multiprecision::numerator(padded).convert_to<std::int64_t>(),
                              boost::multiprecision::denominator(padded).convert_to<std::int64_t>()};
    f.known_value_note = g.known_value_note + "; unpadded value " + rational_text(*g.known_value) +
                         " mapped through padding eps = " + rational_text(eps);
  }
  if (g.witness) f.witness = std::pair{to_decimal(g.witness->rho0), to_decimal(g.witness->rho1)};
  if (planted_no_projector(g.instance)) {
    ProtocolInstance padded = g.instance;
    if (pad_num > 0) padded = apply_soundness_padding(g.instance, eps.convert_to<double>());
    f.dual_witness = to_decimal(optimal_dual_for_planted_no(padded).y);
  }
  return f;
}

std::string serialize_instance(const InstanceFile& f) {
  json doc;
  doc["format"] = "qmam-instance";
  doc["format_version"] = f.format_version;
  doc["index_convention"] = kIndexConvention;
  doc["dims"] = {{"dW", f.dims.dW}, {"dY", f.dims.dY}};
  doc["padding_eps"] = json::array({f.padding_eps.first, f.padding_eps.second});
  doc["P0"] = matrix_json(f.p0);
  doc["P1"] = matrix_json(f.p1);
  json meta;
  meta["generator"] = f.generator;
  meta["seed"] = f.seed;
  meta["params"] = f.params;
  if (f.known_value) {
    meta["known_value"] = json::array({f.known_value->first, f.known_value->second});
    meta["known_value_note"] = f.known_value_note;
  } else {
    meta["known_value"] = nullptr;
  }
  if (f.oracle_bracket) {
    meta["oracle_bracket"] = {{"lower", f.oracle_bracket->first}, {"upper", f.oracle_bracket->second}};
  }
  doc["metadata"] = std::move(meta);
  if (f.witness) {
    doc["witness"] = {{"rho0", matrix_json(f.witness->first)},
                      {"rho1", matrix_json(f.witness->second)}};
  }
  if (f.dual_witness) doc["dual_witness"] = {{"Y", matrix_json(*f.dual_witness)}};
  return doc.dump(1) + "\n";
}

InstanceFile parse_instance(const std::string& text) {
  const json doc = parse_json(text);
  check_header(doc, "qmam-instance");
  InstanceFile f;
  f.dims = dims_from_json(doc);
  const json& pad = require(doc, "padding_eps", "$");
  if (!pad.is_array() || pad.size() != 2 || !pad[0].is_number_integer() ||
      !pad[1].is_number_integer()) {
    throw FormatError("$.padding_eps", "expected [numerator, denominator]");
  }
  f.padding_eps = {pad[0].get<std::int64_t>(), pad[1].get<std::int64_t>()};
  if (f.padding_eps.second <= 0 || f.padding_eps.first < 0 ||
      4 * f.padding_eps.first > f.padding_eps.second) {
    throw FormatError("$.padding_eps", "must be a rational in [0, 1/4]");
  }
  const int d = f.dims.wy();
  f.p0 = matrix_from_json(require(doc, "P0", "$"), "$.P0");
  f.p1 = matrix_from_json(require(doc, "P1", "$"), "$.P1");
  expect_dim(f.p0, d, "$.P0");
  expect_dim(f.p1, d, "$.P1");

  if (auto it = doc.find("metadata"); it != doc.end() && it->is_object()) {
    const json& meta = *it;
    if (auto g = meta.find("generator"); g != meta.end() && g->is_string()) f.generator = *g;
    if (auto s = meta.find("seed"); s != meta.end() && s->is_number_integer()) f.seed = *s;
    if (auto p = meta.find("params"); p != meta.end() && p->is_object()) {
      for (const auto& [key, value] : p->items()) {
        if (!value.is_number_integer()) throw FormatError("$.metadata.params." + key, "expected an integer");
        f.params[key] = value.get<long long>();
      }
    }
    if (auto kv = meta.find("known_value"); kv != meta.end() && !kv->is_null()) {
      if (!kv->is_array() || kv->size() != 2 || !(*kv)[0].is_number_integer() ||
          !(*kv)[1].is_number_integer() || (*kv)[1].get<std::int64_t>() <= 0) {
        throw FormatError("$.metadata.known_value", "expected [numerator, denominator] or null");
      }
      f.known_value = std::pair{(*kv)[0].get<std::int64_t>(), (*kv)[1].get<std::int64_t>()};
    }
    if (auto b = meta.find("oracle_bracket"); b != meta.end() && !b->is_null()) {
      const std::string where = "$.metadata.oracle_bracket";
      std::string lower = require_string(*b, "lower", where);
      std::string upper = require_string(*b, "upper", where);
      parse_decimal(lower, where + ".lower");
      parse_decimal(upper, where + ".upper");
      f.oracle_bracket = std::pair{std::move(lower), std::move(upper)};
    }
    if (auto note = meta.find("known_value_note"); note != meta.end() && note->is_string()) {
      f.known_value_note = *note;
    }
  }
  if (auto w = doc.find("witness"); w != doc.end()) {
    DecimalMatrix r0 = matrix_from_json(require(*w, "rho0", "$.witness"), "$.witness.rho0");
    DecimalMatrix r1 = matrix_from_json(require(*w, "rho1", "$.witness"), "$.witness.rho1");
    expect_dim(r0, d, "$.witness.rho0");
    expect_dim(r1, d, "$.witness.rho1");
    f.witness = std::pair{std::move(r0), std::move(r1)};
  }
  if (auto w = doc.find("dual_witness"); w != doc.end()) {
    DecimalMatrix y = matrix_from_json(require(*w, "Y", "$.dual_witness"), "$.dual_witness.Y");
    expect_dim(y, f.dims.xw(), "$.dual_witness.Y");
    f.dual_witness = std::move(y);
  }
  return f;
}

ProtocolInstance to_protocol_instance(const InstanceFile& f) {
  ProtocolInstance inst;
  inst.dims = f.dims;
  inst.p0 = from_decimal(f.p0, "$.P0");
  inst.p1 = from_decimal(f.p1, "$.P1");
  try {
    check_instance(inst);
  } catch (const PreconditionError& e) {
    throw FormatError("$.P0/$.P1", e.what());
  }
  if (f.padding_eps.first > 0) {
    inst = apply_soundness_padding(
        inst, static_cast<double>(f.padding_eps.first) / static_cast<double>(f.padding_eps.second));
  }
  return inst;
}

void revalidate_witnesses(const InstanceFile& f) {
  if (!f.known_value) return;
  const double known =
      static_cast<double>(f.known_value->first) / static_cast<double>(f.known_value->second);
  const ProtocolInstance inst = to_protocol_instance(f);
  if (f.witness) {
    double value = 0.0;
    try {
      value = strategy_value(inst, from_decimal(f.witness->first, "$.witness.rho0"),
                             from_decimal(f.witness->second, "$.witness.rho1"), 1e-9);
    } catch (const PreconditionError& e) {
      throw FormatError("$.witness", e.what());
    }
    if (std::abs(value - known) > 1e-9) {
      throw FormatError("$.witness", "strategy value " + format_decimal(value) +
                                         " does not reach the known value");
    }
  }
  if (f.dual_witness) {
    const ValidationReport rep =
        validate_dual_unscaled(inst, DualCandidate{from_decimal(*f.dual_witness, "$.dual_witness.Y")});
    if (!rep.feasible || std::abs(rep.objective - known) > 1e-9) {
      throw FormatError("$.dual_witness", "dual witness does not certify the known value (" +
                                              rep.detail + ")");
    }
  }
}

CertificateFile make_certificate_file(const SolveOutcome& outcome, const SolverConfig& cfg,
                                      const DimTriple& dims) {
  CertificateFile f;
  f.dims = dims;
  if (outcome.verdict == Verdict::accept && outcome.primal) {
    f.kind = "primal";
    f.x = to_decimal(outcome.primal->x);
    f.sigma = to_decimal(outcome.primal->sigma);
  } else if (outcome.verdict == Verdict::reject && outcome.dual) {
    f.kind = "dual";
    f.y = to_decimal(outcome.dual->y);
  } else {
    throw PreconditionError("make_certificate_file: outcome carries no certificate");
  }
  f.claimed_objective = format_decimal(outcome.objective);
  f.tolerance = cfg.validation_tol;
  f.solver = {
      {"mode", to_string(cfg.mode)},
      {"gamma", rational_text(cfg.gamma)},
      {"eps", rational_text(cfg.eps)},
      {"delta", rational_text(cfg.delta)},
      {"mu", rational_text(cfg.mu)},
      {"step_scale", rational_text(cfg.step_scale)},
      {"T", std::to_string(cfg.T)},
      {"iteration_cap", std::to_string(cfg.iteration_cap)},
      {"polish_iterations", std::to_string(cfg.polish_iterations)},
      {"fixed_point_bits", cfg.fixed_point_bits ? std::to_string(*cfg.fixed_point_bits) : "off"},
      {"seed", std::to_string(cfg.seed)},
      {"iterations_used", std::to_string(outcome.iterations_used)},
  };
  return f;
}

std::string serialize_certificate(const CertificateFile& f) {
  json doc;
  doc["format"] = "qmam-certificate";
  doc["format_version"] = f.format_version;
  doc["index_convention"] = kIndexConvention;
  doc["kind"] = f.kind;
  doc["dims"] = {{"dW", f.dims.dW}, {"dY", f.dims.dY}};
  if (f.x) doc["X"] = matrix_json(*f.x);
  if (f.sigma) doc["sigma"] = matrix_json(*f.sigma);
  if (f.y) doc["Y"] = matrix_json(*f.y);
  doc["claimed_objective"] = f.claimed_objective;
  doc["tolerance"] = format_decimal(f.tolerance);
  doc["solver"] = f.solver;
  return doc.dump(1) + "\n";
}

CertificateFile parse_certificate(const std::string& text) {
  const json doc = parse_json(text);
  check_header(doc, "qmam-certificate");
  CertificateFile f;
  f.dims = dims_from_json(doc);
  f.kind = require_string(doc, "kind", "$");
  if (f.kind == "primal") {
    f.x = matrix_from_json(require(doc, "X", "$"), "$.X");
    f.sigma = matrix_from_json(require(doc, "sigma", "$"), "$.sigma");
    expect_dim(*f.x, f.dims.N(), "$.X");
    expect_dim(*f.sigma, f.dims.M(), "$.sigma");
  } else if (f.kind == "dual") {
    f.y = matrix_from_json(require(doc, "Y", "$"), "$.Y");
    expect_dim(*f.y, f.dims.xw(), "$.Y");
  } else {
    throw FormatError("$.kind", "expected 'primal' or 'dual', found '" + f.kind + "'");
  }
  f.claimed_objective = require_string(doc, "claimed_objective", "$");
  parse_decimal(f.claimed_objective, "$.claimed_objective");
  f.tolerance = parse_decimal(require_string(doc, "tolerance", "$"), "$.tolerance");
  if (auto s = doc.find("solver"); s != doc.end() && s->is_object()) {
    for (const auto& [key, value] : s->items()) {
      if (value.is_string()) f.solver[key] = value.get<std::string>();
    }
  }
  return f;
}

ValidationReport revalidate_certificate(const SdpInstance& sdp, const CertificateFile& f,
                                        std::optional<double> tol) {
  if (!(f.dims == sdp.dims)) throw FormatError("$.dims", "certificate dimensions do not match the instance");
  const double t = tol.value_or(f.tolerance);
  ValidationReport rep;
  if (f.kind == "primal") {
    rep = validate_primal(sdp, PrimalCandidate{from_decimal(*f.x, "$.X"), from_decimal(*f.sigma, "$.sigma")}, t);
  } else {
    rep = validate_dual(sdp, DualCandidate{from_decimal(*f.y, "$.Y")}, t);
  }
  const double claimed = parse_decimal(f.claimed_objective, "$.claimed_objective");
  if (std::abs(rep.objective - claimed) > t * std::max(1.0, std::abs(claimed))) {
    rep.feasible = false;
    rep.detail += "; recomputed objective " + format_decimal(rep.objective) +
                  " differs from the claimed " + f.claimed_objective;
  }
  return rep;
}

std::string trace_line(const TraceRecord& r) {
  json j;
  j["t"] = r.t;
  j["beta"] = r.beta;
  if (!r.beta_exact.empty()) j["beta_exact"] = r.beta_exact;
  j["dual_objective"] = r.dual_objective ? json(*r.dual_objective) : json(nullptr);
  j["accepted"] = r.accepted;
  return j.dump();
}

std::string bracket_report(const ValueBracket& b, const std::optional<double>& closed_form) {
  json j;
  j["format"] = "qmam-bracket";
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["lower_source"] = b.lower_source;
  j["upper_source"] = b.upper_source;
  j["closed_form"] = closed_form ? json(*closed_form) : json(nullptr);
  j["consistent"] = b.lower <= b.upper + 1e-8;
  return j.dump(1) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace qmam
