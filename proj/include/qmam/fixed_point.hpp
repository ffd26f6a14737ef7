#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "qmam/linalg.hpp"
#include "qmam/sdp.hpp"

namespace qmam {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Rounds every real and imaginary part to the nearest multiple of 2^-bits,
/// ties to even. Entries must satisfy |re|, |im| <= 1 + 2^-bits.
ComplexMatrix fixed_point_round(const ComplexMatrix& a, int bits);

/// 32 * ceil(log2 N).
int default_fixed_point_bits(int n);

/// The exact dyadic rational held by a finite double.
Rational exact_rational(double x);

/// Exact value of <Pi, Phi(rho)> = Tr((Pi ⊗ 1_Y) R rho R) for the stored
/// (dyadic) entries of Pi, rho and R = Q^{-1/2}.
Rational exact_beta(const SdpInstance& sdp, const ComplexMatrix& projection,
                    const ComplexMatrix& rho);

}  // namespace qmam
