#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace qmam {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 0x1p-40;
inline constexpr double kUnitaryTol = 0x1p-35;

/// Dimensions of the space X (coin) ⊗ W (Merlin's first message) ⊗ Y
/// (Merlin's second message). The coin space is always a qubit.
struct DimTriple {
  static constexpr int dX = 2;
  int dW = 1;
  int dY = 1;

  int N() const { return dX * dW * dY; }
  int M() const { return dW; }
  int wy() const { return dW * dY; }
  int xw() const { return dX * dW; }

  friend bool operator==(const DimTriple&, const DimTriple&) = default;
};

/// Throws DimensionError unless dW, dY >= 1.
void check_dims(const DimTriple& dims);

/// Eigenvectors in the columns of `unitary`; eigenvalues sorted descending.
struct SpectralDecomposition {
  ComplexMatrix unitary;
  RealVector eigenvalues;
};

struct PositiveSplit {
  ComplexMatrix projection;
  ComplexMatrix positive_part;
};

struct InverseSqrt {
  ComplexMatrix r_inv;
  ComplexMatrix r;
  double lambda_min = 0.0;
};

ComplexMatrix identity(int dim);
ComplexMatrix hermitize(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);
double hermitian_defect(const ComplexMatrix& a);

/// <A, B> = Tr(A* B).
Complex inner_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product, left factor slowest:
/// out(i*dB + k, j*dB + l) = A(i, j) * B(k, l).
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial trace over factor `traced_index` of a space factored as `dims`
/// (first factor slowest).
ComplexMatrix partial_trace(const ComplexMatrix& a, std::span<const int> dims,
                            int traced_index);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

/// Eigenvalues of a Hermitian matrix, descending. No accuracy contract beyond
/// the backward stability of the underlying solver.
RealVector hermitian_eigenvalues(const ComplexMatrix& h);
double lambda_min(const ComplexMatrix& h);
double lambda_max(const ComplexMatrix& h);

/// Spectral decomposition with ||H - U diag(eigenvalues) U*|| < eta.
SpectralDecomposition spectral_decomposition(const ComplexMatrix& h, double eta);

/// X with ||exp(M) - X|| < eta. Requires ||M|| <= k.
ComplexMatrix matrix_exp(const ComplexMatrix& m, double eta, int k);

/// Number of Taylor terms used for a block with norm bound k at accuracy eta.
int exp_series_terms(int k, double eta);

/// Projection onto eigenvectors with eigenvalue strictly above eta, and the
/// compressed operator Pi H Pi.
PositiveSplit positive_projection(const ComplexMatrix& h, double eta);

/// R = Q^{1/2} with ||Q - R^2|| <= eps and R_inv = R^{-1}.
InverseSqrt inv_sqrt(const ComplexMatrix& q, double eps);

}  // namespace qmam
