#include "qmam/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/QR>

namespace qmam {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1p-53;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Complex Rng::complex_gaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return {re, im};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ComplexMatrix gaussian_matrix(int rows, int cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  // Row-major draw order.
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  }
  return g;
}

ComplexMatrix haar_unitary(int dim, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  // Fix the phase of each column so the distribution is Haar.
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

ComplexMatrix random_density(int dim, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
  ComplexMatrix rho = hermitize(g * g.adjoint());
  return rho / rho.trace().real();
}

ComplexMatrix random_projector(int dim, int rank, Rng& rng) {
  if (rank < 0 || rank > dim) throw std::invalid_argument("random_projector: rank out of range");
  if (rank == 0) return ComplexMatrix::Zero(dim, dim);
  if (rank == dim) return identity(dim);
  const ComplexMatrix u = haar_unitary(dim, rng);
  const auto basis = u.leftCols(rank);
  return hermitize(basis * basis.adjoint());
}

ComplexMatrix random_hermitian(int dim, double norm, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
  ComplexMatrix h = hermitize(g);
  const double current = spectral_norm(h);
  if (current > 0.0) h *= norm / current;
  return h;
}

ComplexMatrix random_contraction_psd(int dim, Rng& rng) {
  const ComplexMatrix u = haar_unitary(dim, rng);
  RealVector values(dim);
  for (int i = 0; i < dim; ++i) values(i) = rng.uniform();
  return hermitize(u * values.cast<Complex>().asDiagonal() * u.adjoint());
}

}  // namespace qmam
