#pragma once

#include <cstdint>
#include <random>

#include "qmam/linalg.hpp"

namespace qmam {

/// Seeded source for every random object in the library. The engine and the
/// uniform/Gaussian transforms are fully specified so streams reproduce
/// bit-exactly across platforms (std::normal_distribution does not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double gaussian();
  /// Real and imaginary parts independent standard normals.
  Complex complex_gaussian();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream seed for sub-task `index` of a run seeded with `seed` (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

ComplexMatrix gaussian_matrix(int rows, int cols, Rng& rng);
ComplexMatrix haar_unitary(int dim, Rng& rng);
/// Normalized Gram matrix of a square Gaussian matrix; full rank almost surely.
ComplexMatrix random_density(int dim, Rng& rng);
ComplexMatrix random_projector(int dim, int rank, Rng& rng);
/// Random Hermitian matrix rescaled so that its spectral norm is `norm`.
ComplexMatrix random_hermitian(int dim, double norm, Rng& rng);
/// Random PSD matrix with eigenvalues in [0, 1].
ComplexMatrix random_contraction_psd(int dim, Rng& rng);

}  // namespace qmam
