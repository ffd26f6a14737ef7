#include "qmam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qmam/errors.hpp"

namespace qmam {

namespace {

void check_square(const ComplexMatrix& a, const char* op) {
  if (a.rows() < 1 || a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << op << ": expected a non-empty square matrix, got " << a.rows() << "x"
        << a.cols();
    throw DimensionError(msg.str());
  }
}

void check_hermitian(const ComplexMatrix& a, const char* op) {
  const double defect = hermitian_defect(a);
  if (!(defect <= kHermitianTol)) {
    std::ostringstream msg;
    msg << op << ": input is not Hermitian (defect " << defect << ")";
    throw NotHermitianError(msg.str());
  }
}

ComplexMatrix reconstruct(const ComplexMatrix& u, const RealVector& values) {
  return u * values.cast<Complex>().asDiagonal() * u.adjoint();
}

}  // namespace

void check_dims(const DimTriple& dims) {
  if (dims.dW < 1 || dims.dY < 1) {
    std::ostringstream msg;
    msg << "invalid dimensions dW=" << dims.dW << " dY=" << dims.dY;
    throw DimensionError(msg.str());
  }
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix hermitize(const ComplexMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

double hermitian_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i; j < a.cols(); ++j) {
      worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
    }
  }
  return worst;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return hermitian_defect(a) <= tol;
}

Complex inner_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << "inner_product: incompatible operands " << a.rows() << "x" << a.cols()
        << " and " << b.rows() << "x" << b.cols();
    throw DimensionError(msg.str());
  }
  // Fixed row-major summation order.
  Complex sum{0.0, 0.0};
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      sum += std::conj(a(i, j)) * b(i, j);
    }
  }
  return sum;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  ComplexMatrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i) {
    for (Eigen::Index j = 0; j < ac; ++j) {
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& a, std::span<const int> dims,
                            int traced_index) {
  check_square(a, "partial_trace");
  if (dims.empty() || traced_index < 0 ||
      traced_index >= static_cast<int>(dims.size())) {
    throw DimensionError("partial_trace: traced index out of range");
  }
  long total = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionError("partial_trace: factor dimensions must be positive");
    total *= d;
  }
  if (total != a.rows()) {
    std::ostringstream msg;
    msg << "partial_trace: factor dimensions multiply to " << total
        << " but the operator has dimension " << a.rows();
    throw DimensionError(msg.str());
  }
  long before = 1;
  for (int i = 0; i < traced_index; ++i) before *= dims[i];
  const long mid = dims[traced_index];
  const long after = total / (before * mid);
  const long out_dim = before * after;

  ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
  for (long b = 0; b < before; ++b) {
    for (long a1 = 0; a1 < after; ++a1) {
      const long row = b * after + a1;
      for (long b2 = 0; b2 < before; ++b2) {
        for (long a2 = 0; a2 < after; ++a2) {
          const long col = b2 * after + a2;
          Complex sum{0.0, 0.0};
          for (long m = 0; m < mid; ++m) {
            sum += a(b * mid * after + m * after + a1, b2 * mid * after + m * after + a2);
          }
          out(row, col) = sum;
        }
      }
    }
  }
  return out;
}

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

RealVector hermitian_eigenvalues(const ComplexMatrix& h) {
  check_square(h, "hermitian_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("hermitian_eigenvalues: solver did not converge", INFINITY);
  }
  return solver.eigenvalues().reverse();
}

double lambda_min(const ComplexMatrix& h) { return hermitian_eigenvalues(h).minCoeff(); }

double lambda_max(const ComplexMatrix& h) { return hermitian_eigenvalues(h).maxCoeff(); }

SpectralDecomposition spectral_decomposition(const ComplexMatrix& h, double eta) {
  check_square(h, "spectral_decomposition");
  if (!(eta > 0.0)) throw std::invalid_argument("spectral_decomposition: eta must be positive");
  check_hermitian(h, "spectral_decomposition");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("spectral_decomposition: solver did not converge", INFINITY);
  }
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.unitary = solver.eigenvectors().rowwise().reverse();

  // Frobenius norm bounds the spectral norm; only fall back to an SVD when it
  // is inconclusive.
  const ComplexMatrix residual = h - reconstruct(out.unitary, out.eigenvalues);
  double err = residual.norm();
  if (!(err < eta)) {
    err = spectral_norm(residual);
    if (!(err < eta)) {
      std::ostringstream msg;
      msg << "spectral_decomposition: residual " << err << " does not meet eta " << eta;
      throw ConvergenceError(msg.str(), err);
    }
  }
  return out;
}

int exp_series_terms(int k, double eta) {
  const int log_term = static_cast<int>(std::ceil(std::log2(1.0 / eta)));
  return std::max(3 * k + std::max(log_term, 0) + 8, 16);
}

ComplexMatrix matrix_exp(const ComplexMatrix& m, double eta, int k) {
  check_square(m, "matrix_exp");
  if (!(eta > 0.0)) throw std::invalid_argument("matrix_exp: eta must be positive");
  if (k < 1) throw std::invalid_argument("matrix_exp: k must be positive");

  // The computed norm carries roundoff; a promise met exactly must pass.
  const double limit = k * (1.0 + 0x1p-40);
  double bound = m.norm();
  if (bound > limit) {
    bound = spectral_norm(m);
    if (bound > limit) {
      std::ostringstream msg;
      msg << "matrix_exp: ||M|| = " << bound << " exceeds the promised bound k = " << k;
      throw PromiseViolation(msg.str());
    }
  }

  // Scale into ||A|| <= 1/2, sum the truncated series by Horner's rule, then
  // square back. The per-stage accuracy is tightened by the squaring count.
  int squarings = 0;
  while (std::ldexp(bound, -squarings) > 0.5) ++squarings;
  const ComplexMatrix a = m * std::ldexp(1.0, -squarings);
  const int terms = exp_series_terms(1, std::ldexp(eta, -squarings - 1));

  const Eigen::Index n = m.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix result = id;
  for (int j = terms; j >= 1; --j) {
    result = id + (a * result) / static_cast<double>(j);
  }
  for (int s = 0; s < squarings; ++s) {
    result = result * result;
  }
  if (is_hermitian(m)) result = hermitize(result);
  return result;
}

PositiveSplit positive_projection(const ComplexMatrix& h, double eta) {
  check_square(h, "positive_projection");
  check_hermitian(h, "positive_projection");
  const SpectralDecomposition dec = spectral_decomposition(h, eta);

  const Eigen::Index n = h.rows();
  Eigen::Index count = 0;
  while (count < n && dec.eigenvalues(count) > eta) ++count;

  PositiveSplit out;
  if (count == 0) {
    out.projection = ComplexMatrix::Zero(n, n);
  } else {
    const auto basis = dec.unitary.leftCols(count);
    out.projection = hermitize(basis * basis.adjoint());
  }
  out.positive_part = hermitize(out.projection * h * out.projection);
  return out;
}

InverseSqrt inv_sqrt(const ComplexMatrix& q, double eps) {
  check_square(q, "inv_sqrt");
  if (!(eps > 0.0)) throw std::invalid_argument("inv_sqrt: eps must be positive");
  check_hermitian(q, "inv_sqrt");

  const SpectralDecomposition dec = spectral_decomposition(q, eps / 2);
  const double lmin = dec.eigenvalues.minCoeff();
  if (!(lmin > 0.0)) {
    std::ostringstream msg;
    msg << "inv_sqrt: operator is not positive definite (lambda_min = " << lmin << ")";
    throw PromiseViolation(msg.str());
  }

  const RealVector roots = dec.eigenvalues.cwiseSqrt();
  InverseSqrt out;
  out.lambda_min = lmin;
  out.r = hermitize(reconstruct(dec.unitary, roots));
  out.r_inv = hermitize(reconstruct(dec.unitary, roots.cwiseInverse()));

  const double residual = spectral_norm(q - out.r * out.r);
  if (residual > eps) {
    throw ConvergenceError("inv_sqrt: ||Q - R^2|| exceeds eps", residual);
  }
  if (lmin >= 2 * eps && 1.0 / std::sqrt(lmin) > 1.0 / eps) {
    throw PromiseViolation("inv_sqrt: ||R^{-1}|| exceeds 1/eps");
  }
  return out;
}

}  // namespace qmam
