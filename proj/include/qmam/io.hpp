#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmam/errors.hpp"
#include "qmam/generators.hpp"
#include "qmam/oracle.hpp"
#include "qmam/sdp.hpp"
#include "qmam/solver.hpp"

namespace qmam {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kIndexConvention =
    "row-major; operators on X(x)W(x)Y use flat index a*(dW*dY) + w*dY + y, operators on "
    "W(x)Y use w*dY + y, operators on X(x)W use a*dW + w";

/// Malformed input file; `where` names the line or field at fault.
class FormatError : public Error {
 public:
  FormatError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where), reason_(what) {}
  const std::string& where() const noexcept { return where_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string where_;
  std::string reason_;
};

/// Matrix entries as decimal strings, row-major [re, im] pairs.
struct DecimalMatrix {
  int dim = 0;
  std::vector<std::pair<std::string, std::string>> entries;
};

DecimalMatrix to_decimal(const ComplexMatrix& a);
/// Each decimal string is rounded to the nearest double.
ComplexMatrix from_decimal(const DecimalMatrix& m, const std::string& field = "matrix");
/// Shortest decimal string that reads back as exactly `x`.
std::string format_decimal(double x);
double parse_decimal(const std::string& s, const std::string& field = "value");

struct InstanceFile {
  int format_version = kFormatVersion;
  DimTriple dims;
  std::pair<std::int64_t, std::int64_t> padding_eps{1, 64};  // 0/1 for none
  DecimalMatrix p0;
  DecimalMatrix p1;
  std::string generator;
  std::uint64_t seed = 0;
  std::map<std::string, long long> params;
  // Value of the game after padding, as an exact rational.
  std::optional<std::pair<std::int64_t, std::int64_t>> known_value;
  std::string known_value_note;
  std::optional<std::pair<DecimalMatrix, DecimalMatrix>> witness;  // (rho0, rho1)
  std::optional<DecimalMatrix> dual_witness;                       // Y
  std::optional<std::pair<std::string, std::string>> oracle_bracket;  // (lower, upper)
};

InstanceFile make_instance_file(const GeneratedInstance& g, std::int64_t pad_num = 1,
                                std::int64_t pad_den = 64);
std::string serialize_instance(const InstanceFile& f);
InstanceFile parse_instance(const std::string& text);
/// The game the solver sees: operators from the file with padding applied.
ProtocolInstance to_protocol_instance(const InstanceFile& f);
/// Checks the stored witnesses against the stored known value; throws FormatError.
void revalidate_witnesses(const InstanceFile& f);

struct CertificateFile {
  int format_version = kFormatVersion;
  std::string kind;  // "primal" or "dual"
  DimTriple dims;
  std::optional<DecimalMatrix> x;
  std::optional<DecimalMatrix> sigma;
  std::optional<DecimalMatrix> y;
  std::string claimed_objective;
  double tolerance = kDefaultValidationTol;
  std::map<std::string, std::string> solver;
};

CertificateFile make_certificate_file(const SolveOutcome& outcome, const SolverConfig& cfg,
                                      const DimTriple& dims);
std::string serialize_certificate(const CertificateFile& f);
CertificateFile parse_certificate(const std::string& text);
/// Revalidates against the program; also fails if the recomputed objective
/// disagrees with the claimed one by more than the tolerance.
ValidationReport revalidate_certificate(const SdpInstance& sdp, const CertificateFile& f,
                                        std::optional<double> tol = std::nullopt);

std::string trace_line(const TraceRecord& r);
std::string bracket_report(const ValueBracket& b, const std::optional<double>& closed_form);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace qmam
