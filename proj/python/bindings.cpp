#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qmam/errors.hpp"
#include "qmam/generators.hpp"
#include "qmam/io.hpp"
#include "qmam/linalg.hpp"
#include "qmam/oracle.hpp"
#include "qmam/sdp.hpp"
#include "qmam/solver.hpp"

namespace py = pybind11;
using namespace qmam;

namespace {

std::string rational_text(const Rational& r) {
  std::ostringstream out;
  out << boost::multiprecision::numerator(r) << "/" << boost::multiprecision::denominator(r);
  return out.str();
}

Rational rational_from(const py::handle& value) {
  // Accepts int, fractions.Fraction or a "num/den" string.
  if (py::isinstance<py::str>(value)) {
    const std::string s = value.cast<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
  }
  if (py::hasattr(value, "numerator") && py::hasattr(value, "denominator")) {
    const std::string num = py::str(value.attr("numerator"));
    const std::string den = py::str(value.attr("denominator"));
    return Rational(BigInt(num), BigInt(den));
  }
  throw py::type_error("expected an int, Fraction or 'num/den' string");
}

py::dict trace_dict(const TraceRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["beta"] = r.beta;
  d["beta_exact"] = r.beta_exact.empty() ? py::object(py::none()) : py::object(py::str(r.beta_exact));
  d["dual_objective"] = r.dual_objective ? py::object(py::float_(*r.dual_objective)) : py::object(py::none());
  d["accepted"] = r.accepted;
  return d;
}

ConfigOverrides overrides_from(const py::kwargs& kw) {
  ConfigOverrides o;
  for (const auto& [key_handle, value] : kw) {
    const std::string key = py::str(key_handle);
    if (value.is_none()) continue;
    if (key == "mode") o.mode = parse_mode(value.cast<std::string>());
    else if (key == "gamma") o.gamma = rational_from(value);
    else if (key == "eps") o.eps = rational_from(value);
    else if (key == "mu") o.mu = rational_from(value);
    else if (key == "step_scale") o.step_scale = rational_from(value);
    else if (key == "iterations") o.iterations = value.cast<std::int64_t>();
    else if (key == "iteration_cap") o.iteration_cap = value.cast<std::int64_t>();
    else if (key == "fixed_point_bits") o.fixed_point_bits = value.cast<int>();
    else if (key == "seed") o.seed = value.cast<std::uint64_t>();
    else if (key == "polish_iterations") o.polish_iterations = value.cast<std::int64_t>();
    else if (key == "validation_tol") o.validation_tol = value.cast<double>();
    else throw py::type_error("unknown solver option '" + key + "'");
  }
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matrix multiplicative weights solver for single-coin QMAM games";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<NotHermitianError>(m, "NotHermitianError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<PromiseViolation>(m, "PromiseViolation", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());

  // Kernels.
  m.def("tensor", &tensor);
  m.def("inner_product", &inner_product);
  m.def("partial_trace", [](const ComplexMatrix& a, const std::vector<int>& dims, int index) {
    return partial_trace(a, dims, index);
  }, py::arg("a"), py::arg("dims"), py::arg("traced_index"));
  m.def("spectral_norm", &spectral_norm);
  m.def("spectral_decomposition", [](const ComplexMatrix& h, double eta) {
    const SpectralDecomposition d = spectral_decomposition(h, eta);
    return py::make_tuple(d.eigenvalues, d.unitary);
  }, py::arg("h"), py::arg("eta") = 0x1p-30);
  m.def("matrix_exp", &matrix_exp, py::arg("m"), py::arg("eta"), py::arg("k"));
  m.def("positive_projection", [](const ComplexMatrix& h, double eta) {
    const PositiveSplit s = positive_projection(h, eta);
    return py::make_tuple(s.projection, s.positive_part);
  }, py::arg("h"), py::arg("eta") = 0x1p-30);
  m.def("inv_sqrt", [](const ComplexMatrix& q, double eps) {
    const InverseSqrt r = inv_sqrt(q, eps);
    return py::make_tuple(r.r_inv, r.r);
  }, py::arg("q"), py::arg("eps"));

  // Instances and the program.
  py::class_<ProtocolInstance>(m, "ProtocolInstance")
      .def(py::init([](int dW, int dY, const ComplexMatrix& p0, const ComplexMatrix& p1) {
             ProtocolInstance inst;
             inst.dims = {dW, dY};
             inst.p0 = p0;
             inst.p1 = p1;
             check_instance(inst);
             return inst;
           }),
           py::arg("dW"), py::arg("dY"), py::arg("p0"), py::arg("p1"))
      .def_property_readonly("dW", [](const ProtocolInstance& i) { return i.dims.dW; })
      .def_property_readonly("dY", [](const ProtocolInstance& i) { return i.dims.dY; })
      .def_readonly("p0", &ProtocolInstance::p0)
      .def_readonly("p1", &ProtocolInstance::p1)
      .def_readonly("padded", &ProtocolInstance::padded)
      .def_readonly("padding_eps", &ProtocolInstance::padding_eps);

  py::class_<SdpInstance>(m, "SdpInstance")
      .def_property_readonly("N", [](const SdpInstance& s) { return s.dims.N(); })
      .def_property_readonly("M", [](const SdpInstance& s) { return s.dims.M(); })
      .def_readonly("q", &SdpInstance::q)
      .def_readonly("r_inv", &SdpInstance::r_inv)
      .def_readonly("qinv_norm", &SdpInstance::qinv_norm);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("feasible", &ValidationReport::feasible)
      .def_readonly("objective", &ValidationReport::objective)
      .def_readonly("worst_violation", &ValidationReport::worst_violation)
      .def_readonly("detail", &ValidationReport::detail);

  m.def("apply_soundness_padding", &apply_soundness_padding, py::arg("instance"),
        py::arg("eps") = kDefaultPaddingEps);
  m.def("assemble", &assemble);
  m.def("phi", &phi);
  m.def("phi_adjoint", &phi_adjoint);
  m.def("validate_primal", [](const SdpInstance& sdp, const ComplexMatrix& x, const ComplexMatrix& sigma, double tol) {
    return validate_primal(sdp, PrimalCandidate{x, sigma}, tol);
  }, py::arg("sdp"), py::arg("x"), py::arg("sigma"), py::arg("tol") = kDefaultValidationTol);
  m.def("validate_dual", [](const SdpInstance& sdp, const ComplexMatrix& y, double tol) {
    return validate_dual(sdp, DualCandidate{y}, tol);
  }, py::arg("sdp"), py::arg("y"), py::arg("tol") = kDefaultValidationTol);
  m.def("strategy_value", &strategy_value, py::arg("instance"), py::arg("rho0"), py::arg("rho1"),
        py::arg("tol") = kMeasurementTol);

  // Generators. Each returns (instance, known unpadded value or None).
  auto generated = [](const GeneratedInstance& g) {
    py::object known = py::none();
    if (g.known_value) known = py::module_::import("fractions").attr("Fraction")(rational_text(*g.known_value));
    return py::make_tuple(g.instance, known);
  };
  m.def("gen_planted_yes", [generated](int dW, int dY, std::uint64_t seed) { return generated(gen_planted_yes(dW, dY, seed)); },
        py::arg("dW"), py::arg("dY"), py::arg("seed"));
  m.def("gen_planted_no", [generated](int dW, int dY, int k, std::uint64_t seed) { return generated(gen_planted_no(dW, dY, k, seed)); },
        py::arg("dW"), py::arg("dY"), py::arg("k"), py::arg("seed"));
  m.def("gen_random", [generated](int dW, int dY, int r0, int r1, std::uint64_t seed) {
    return generated(gen_random(dW, dY, r0, r1, seed));
  }, py::arg("dW"), py::arg("dY"), py::arg("rank0"), py::arg("rank1"), py::arg("seed"));
  m.def("scalar_instance", [generated](int dW, int dY) { return generated(scalar_instance(dW, dY)); },
        py::arg("dW"), py::arg("dY"));
  m.def("bell_planted_yes", [generated] { return generated(bell_planted_yes()); });

  // Solver.
  py::class_<SolverConfig>(m, "SolverConfig")
      .def_property_readonly("gamma", [](const SolverConfig& c) { return rational_text(c.gamma); })
      .def_property_readonly("eps", [](const SolverConfig& c) { return rational_text(c.eps); })
      .def_property_readonly("delta", [](const SolverConfig& c) { return rational_text(c.delta); })
      .def_property_readonly("mu", [](const SolverConfig& c) { return rational_text(c.mu); })
      .def_property_readonly("step_scale", [](const SolverConfig& c) { return rational_text(c.step_scale); })
      .def_readonly("T", &SolverConfig::T)
      .def_property_readonly("mode", [](const SolverConfig& c) { return std::string(to_string(c.mode)); })
      .def_readonly("iteration_cap", &SolverConfig::iteration_cap)
      .def_readonly("fixed_point_bits", &SolverConfig::fixed_point_bits)
      .def_readonly("validation_tol", &SolverConfig::validation_tol)
      .def_property_readonly("step", &SolverConfig::step);

  m.def("configure", [](const SdpInstance& sdp, const py::kwargs& kw) { return configure(sdp, overrides_from(kw)); },
        py::arg("sdp"));

  py::class_<SolveOutcome>(m, "SolveOutcome")
      .def_property_readonly("verdict", [](const SolveOutcome& o) { return std::string(to_string(o.verdict)); })
      .def_readonly("objective", &SolveOutcome::objective)
      .def_readonly("iterations_used", &SolveOutcome::iterations_used)
      .def_readonly("diagnostics", &SolveOutcome::diagnostics)
      .def_readonly("report", &SolveOutcome::report)
      .def_property_readonly("primal", [](const SolveOutcome& o) -> py::object {
        if (!o.primal) return py::none();
        return py::make_tuple(o.primal->x, o.primal->sigma);
      })
      .def_property_readonly("dual", [](const SolveOutcome& o) -> py::object {
        if (!o.dual) return py::none();
        return py::cast(o.dual->y);
      })
      .def_property_readonly("trace", [](const SolveOutcome& o) {
        py::list out;
        for (const auto& r : o.trace) out.append(trace_dict(r));
        return out;
      });

  m.def("solve", [](const SdpInstance& sdp, const SolverConfig& cfg) {
    py::gil_scoped_release release;
    return solve(sdp, cfg);
  }, py::arg("sdp"), py::arg("config"));

  // Oracle.
  m.def("closed_form_value", &closed_form_value);
  m.def("optimal_dual_for_planted_no", [](const ProtocolInstance& inst) { return optimal_dual_for_planted_no(inst).y; });
  m.def("random_search_lower_bound", [](const ProtocolInstance& inst, int samples, std::uint64_t seed) {
    const LowerBound lb = random_search_lower_bound(inst, samples, seed);
    return py::make_tuple(lb.value, lb.witness.rho0, lb.witness.rho1);
  }, py::arg("instance"), py::arg("samples"), py::arg("seed"));
  m.def("bracket", [](const ProtocolInstance& inst, const SdpInstance& sdp, int samples, std::uint64_t seed,
                      const std::vector<ComplexMatrix>& duals) {
    BracketExtras extras;
    for (const auto& y : duals) extras.duals.push_back(DualCandidate{y});
    const ValueBracket b = bracket(inst, sdp, samples, seed, extras);
    py::dict d;
    d["lower"] = b.lower;
    d["upper"] = b.upper;
    d["lower_source"] = b.lower_source;
    d["upper_source"] = b.upper_source;
    return d;
  }, py::arg("instance"), py::arg("sdp"), py::arg("samples") = 2000, py::arg("seed") = 0,
     py::arg("duals") = std::vector<ComplexMatrix>{});

  // Files.
  m.def("load_instance", [](const std::string& path) {
    const InstanceFile f = parse_instance(read_file(path));
    revalidate_witnesses(f);
    return to_protocol_instance(f);
  });
  m.def("validate_certificate_file", [](const ProtocolInstance& inst, const std::string& path, std::optional<double> tol) {
    return revalidate_certificate(assemble(inst), parse_certificate(read_file(path)), tol);
  }, py::arg("instance"), py::arg("path"), py::arg("tol") = py::none());
}
