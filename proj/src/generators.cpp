#include "qmam/generators.hpp"

#include <cmath>
#include <sstream>

#include "qmam/errors.hpp"
#include "qmam/random.hpp"

namespace qmam {

namespace {

// Square root of a PSD matrix through its eigendecomposition.
ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  const SpectralDecomposition dec = spectral_decomposition(hermitize(a), 0x1p-40);
  const RealVector roots = dec.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return dec.unitary * roots.cast<Complex>().asDiagonal() * dec.unitary.adjoint();
}

// |u> = sum_{w, y < dW} sqrt(sigma)[w][y] |w>|y>, so Tr_Y |u><u| = sigma.
ComplexVector purification(const ComplexMatrix& sigma, int dY) {
  const int dW = static_cast<int>(sigma.rows());
  const ComplexMatrix root = psd_sqrt(sigma);
  ComplexVector u = ComplexVector::Zero(dW * dY);
  for (int w = 0; w < dW; ++w) {
    for (int y = 0; y < dW; ++y) u(w * dY + y) = root(w, y);
  }
  return u;
}

ComplexVector apply_on_y(const ComplexMatrix& v, const ComplexVector& u, int dW) {
  const int dY = static_cast<int>(v.rows());
  ComplexVector out(dW * dY);
  for (int w = 0; w < dW; ++w) out.segment(w * dY, dY) = v * u.segment(w * dY, dY);
  return out;
}

ComplexMatrix pure(const ComplexVector& psi) { return hermitize(psi * psi.adjoint()); }

void verify_witness(GeneratedInstance& g) {
  const double value = strategy_value(g.instance, g.witness->rho0, g.witness->rho1, 1e-9);
  const double expected = g.known_value->convert_to<double>();
  if (std::abs(value - expected) > 1e-9) {
    std::ostringstream msg;
    msg << g.generator << ": witness value " << value << " does not match " << expected;
    throw ContractViolation(msg.str());
  }
}

}  // namespace

GeneratedInstance gen_planted_yes(int dW, int dY, std::uint64_t seed) {
  if (dW < 2 || dY < dW) {
    throw PreconditionError("gen_planted_yes: requires dY >= dW >= 2");
  }
  Rng rng(seed);
  const ComplexMatrix sigma = random_density(dW, rng);
  const ComplexMatrix v = haar_unitary(dY, rng);
  const ComplexVector psi0 = purification(sigma, dY);
  const ComplexVector psi1 = apply_on_y(v, psi0, dW);

  GeneratedInstance g;
  g.generator = "planted_yes";
  g.seed = seed;
  g.params = {{"dW", dW}, {"dY", dY}};
  g.instance.dims = {dW, dY};
  g.instance.p0 = pure(psi0);
  g.instance.p1 = pure(psi1);
  g.known_value = Rational(1);
  g.known_value_note = "witness rho_a = |psi_a><psi_a| accepts with certainty";
  g.witness = Strategy{g.instance.p0, g.instance.p1};
  verify_witness(g);
  return g;
}

GeneratedInstance bell_planted_yes() {
  const double h = 1.0 / std::sqrt(2.0);
  ComplexVector psi0 = ComplexVector::Zero(4);
  ComplexVector psi1 = ComplexVector::Zero(4);
  psi0(0) = h;  // |00>
  psi0(3) = h;  // |11>
  psi1(1) = h;  // |01>
  psi1(2) = h;  // |10>

  GeneratedInstance g;
  g.generator = "bell_planted_yes";
  g.params = {{"dW", 2}, {"dY", 2}};
  g.instance.dims = {2, 2};
  g.instance.p0 = pure(psi0);
  g.instance.p1 = pure(psi1);
  g.known_value = Rational(1);
  g.known_value_note = "witness rho_a = |psi_a><psi_a|, both marginals 1/2";
  g.witness = Strategy{g.instance.p0, g.instance.p1};
  verify_witness(g);
  return g;
}

GeneratedInstance gen_planted_no(int dW, int dY, int k, std::uint64_t seed) {
  if (dY < 1) throw PreconditionError("gen_planted_no: dY must be positive");
  if (k < 1 || k >= dW) {
    std::ostringstream msg;
    msg << "gen_planted_no: rank k = " << k << " must satisfy 1 <= k < dW = " << dW;
    throw PreconditionError(msg.str());
  }
  Rng rng(seed);
  const ComplexMatrix pi_w = random_projector(dW, k, rng);

  GeneratedInstance g;
  g.generator = "planted_no";
  g.seed = seed;
  g.params = {{"dW", dW}, {"dY", dY}, {"k", k}};
  g.instance.dims = {dW, dY};
  g.instance.p0 = tensor(pi_w, identity(dY));
  g.instance.p1 = identity(dW * dY) - g.instance.p0;
  g.known_value = Rational(1, 2);
  g.known_value_note =
      "every strategy accepts with probability 1/2: <Pi_W, sigma> + 1 - <Pi_W, sigma>, halved";
  // Maximally mixed strategy as witness.
  const ComplexMatrix mixed = identity(dW * dY) / static_cast<double>(dW * dY);
  g.witness = Strategy{mixed, mixed};
  verify_witness(g);
  return g;
}

GeneratedInstance gen_random(int dW, int dY, int rank0, int rank1, std::uint64_t seed) {
  if (dW < 1 || dY < 1) throw PreconditionError("gen_random: dimensions must be positive");
  const int d = dW * dY;
  if (rank0 < 0 || rank0 > d || rank1 < 0 || rank1 > d) {
    std::ostringstream msg;
    msg << "gen_random: ranks must lie in [0, " << d << "]";
    throw PreconditionError(msg.str());
  }
  Rng rng(seed);
  GeneratedInstance g;
  g.generator = "random";
  g.seed = seed;
  g.params = {{"dW", dW}, {"dY", dY}, {"rank0", rank0}, {"rank1", rank1}};
  g.instance.dims = {dW, dY};
  g.instance.p0 = random_projector(d, rank0, rng);
  g.instance.p1 = random_projector(d, rank1, rng);
  if (rank0 == d && rank1 == d) {
    g.known_value = Rational(1);
    g.known_value_note = "both measurements accept outright";
  } else if (rank0 == 0 && rank1 == 0) {
    g.known_value = Rational(0);
    g.known_value_note = "both measurements reject outright";
  }
  return g;
}

GeneratedInstance scalar_instance(int dW, int dY) {
  check_dims({dW, dY});
  GeneratedInstance g;
  g.generator = "scalar";
  g.params = {{"dW", dW}, {"dY", dY}};
  g.instance.dims = {dW, dY};
  g.instance.p0 = identity(dW * dY);
  g.instance.p1 = identity(dW * dY);
  g.known_value = Rational(1);
  g.known_value_note = "P0 = P1 = 1, Q = 1/2";
  const ComplexMatrix mixed = identity(dW * dY) / static_cast<double>(dW * dY);
  g.witness = Strategy{mixed, mixed};
  return g;
}

ProtocolInstance pad_y_ancilla(const ProtocolInstance& inst, int ancilla) {
  if (ancilla < 1) throw PreconditionError("pad_y_ancilla: ancilla dimension must be positive");
  ProtocolInstance out = inst;
  out.dims.dY = inst.dims.dY * ancilla;
  out.p0 = tensor(inst.p0, identity(ancilla));
  out.p1 = tensor(inst.p1, identity(ancilla));
  return out;
}

}  // namespace qmam
