#include "qmam/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "qmam/errors.hpp"

namespace qmam {

namespace {

double round_component(double v, int bits, double limit) {
  if (!(std::abs(v) <= limit)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "fixed_point_round: entry magnitude " << std::abs(v) << " exceeds 1 + 2^-" << bits;
    throw PreconditionError(msg.str());
  }
  // Scaling by a power of two is exact; nearbyint uses the default
  // round-half-to-even mode.
  return std::ldexp(std::nearbyint(std::ldexp(v, bits)), -bits);
}

struct ExactComplex {
  Rational re;
  Rational im;
};

std::vector<ExactComplex> to_exact(const ComplexMatrix& a) {
  std::vector<ExactComplex> out;
  out.reserve(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.push_back({exact_rational(a(i, j).real()), exact_rational(a(i, j).imag())});
    }
  }
  return out;
}

}  // namespace

ComplexMatrix fixed_point_round(const ComplexMatrix& a, int bits) {
  if (bits < 1 || bits > 1000) throw std::invalid_argument("fixed_point_round: bits out of range");
  // 1 + 2^-K is 1.0 in double once K > 52; allow for roundoff in the inputs.
  const double limit = 1.0 + std::max(std::ldexp(1.0, -bits), 0x1p-48);
  ComplexMatrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out(i, j) = Complex{round_component(a(i, j).real(), bits, limit),
                          round_component(a(i, j).imag(), bits, limit)};
    }
  }
  return out;
}

int default_fixed_point_bits(int n) {
  int log2n = 0;
  while ((1L << log2n) < n) ++log2n;
  return 32 * log2n;
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("exact_rational: non-finite value");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double frac = std::frexp(x, &exponent);
  const auto mantissa = static_cast<long long>(std::ldexp(frac, 53));
  exponent -= 53;
  BigInt num(mantissa);
  if (exponent >= 0) return Rational(num << exponent);
  BigInt den(1);
  den <<= -exponent;
  return Rational(num, den);
}

Rational exact_beta(const SdpInstance& sdp, const ComplexMatrix& projection,
                    const ComplexMatrix& rho) {
  const int n = sdp.dims.N();
  const int xw = sdp.dims.xw();
  const int dy = sdp.dims.dY;
  if (projection.rows() != xw || projection.cols() != xw || rho.rows() != n || rho.cols() != n) {
    throw DimensionError("exact_beta: operand shapes do not match the instance");
  }
  const std::vector<ExactComplex> r = to_exact(sdp.r_inv);
  const std::vector<ExactComplex> p = to_exact(projection);
  const std::vector<ExactComplex> rh = to_exact(rho);

  // C = R * rho.
  std::vector<ExactComplex> c(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Rational re = 0, im = 0;
      for (int k = 0; k < n; ++k) {
        const ExactComplex& a = r[i * n + k];
        const ExactComplex& b = rh[k * n + j];
        re += a.re * b.re - a.im * b.im;
        im += a.re * b.im + a.im * b.re;
      }
      c[i * n + j] = {std::move(re), std::move(im)};
    }
  }

  // beta = sum_{u, v, y} conj(Pi[u, v]) * (C R)[(u, y), (v, y)]. The result is
  // real because Pi ⊗ 1 and R rho R are Hermitian.
  Rational beta = 0;
  for (int u = 0; u < xw; ++u) {
    for (int v = 0; v < xw; ++v) {
      const ExactComplex& pi = p[u * xw + v];
      if (pi.re == 0 && pi.im == 0) continue;
      for (int y = 0; y < dy; ++y) {
        const int row = u * dy + y;
        const int col = v * dy + y;
        Rational re = 0, im = 0;
        for (int k = 0; k < n; ++k) {
          const ExactComplex& a = c[row * n + k];
          const ExactComplex& b = r[k * n + col];
          re += a.re * b.re - a.im * b.im;
          im += a.re * b.im + a.im * b.re;
        }
        // Re(conj(pi) * z) = pi.re * z.re + pi.im * z.im
        beta += pi.re * re + pi.im * im;
      }
    }
  }
  return beta;
}

}  // namespace qmam
