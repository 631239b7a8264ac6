#include <doctest.h>

#include <complex>
#include <random>

#include "qmf/qcore.hpp"

using namespace qmf;
using std::complex;

namespace {

// Straight-line oracle: <v|rho|v> via explicit complex arithmetic.
double born_oracle(const DensityMatrix& rho, const Ket& v) {
  const Eigen::VectorXcd amp = v.amplitudes();
  complex<double> acc = 0.0;
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j)
      acc += std::conj(amp[i]) * rho.entries(i, j) * amp[j];
  return acc.real();
}

Ket random_ket(std::mt19937& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> ph(-M_PI, M_PI);
  Eigen::VectorXd m(dim), a(dim);
  for (int i = 0; i < dim; ++i) {
    m[i] = std::abs(g(rng)) + 1e-3;
    a[i] = ph(rng);
  }
  return ket_from_polar(m, a);
}

}  // namespace

TEST_CASE("ket_from_polar normalizes and validates") {
  Eigen::VectorXd m(2), a(2);
  m << 3.0, 4.0;
  a << 0.1, -0.2;
  Ket k = ket_from_polar(m, a);
  CHECK(k.moduli[0] == doctest::Approx(0.6));
  CHECK(k.moduli[1] == doctest::Approx(0.8));
  CHECK(k.args[0] == 0.1);
  k.assert_valid();

  CHECK_THROWS(ket_from_polar(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)));
  Eigen::VectorXd neg(2);
  neg << -1.0, 1.0;
  CHECK_THROWS(ket_from_polar(neg, Eigen::VectorXd::Zero(2)));
  CHECK_THROWS(ket_from_polar(m, Eigen::VectorXd::Zero(3)));
}

TEST_CASE("amplitudes are r*exp(i*theta)") {
  Eigen::VectorXd m(2), a(2);
  m << 1.0, 1.0;
  a << 0.0, M_PI / 2.0;
  Ket k = ket_from_polar(m, a);
  Eigen::VectorXcd amp = k.amplitudes();
  CHECK(amp[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(amp[0].imag() == doctest::Approx(0.0));
  CHECK(amp[1].real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(amp[1].imag() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("tensor_ket matches the dense Kronecker oracle") {
  std::mt19937 rng(101);
  Ket a = random_ket(rng, 3), b = random_ket(rng, 4);
  Ket t = tensor_ket(a, b);
  REQUIRE(t.dim() == 12);
  const Eigen::VectorXcd aa = a.amplitudes(), bb = b.amplitudes(),
                         tt = t.amplitudes();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) {
      const complex<double> expect = aa[i] * bb[j];
      CHECK(std::abs(tt[i * 4 + j] - expect) < 1e-12);
    }
}

TEST_CASE("pure_density is a valid rank-1 projector") {
  std::mt19937 rng(7);
  Ket k = random_ket(rng, 5);
  DensityMatrix rho = pure_density(k);
  rho.assert_valid();
  CHECK(purity(rho) == doctest::Approx(1.0));
  // rho^2 = rho for projectors
  CHECK(((rho.entries * rho.entries) - rho.entries).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("equal mixture of basis states is maximally mixed") {
  // The two preparations |0>,|1> with p=1/2 and |+>,|-> with p=1/2 yield the
  // same density matrix I/2: mixtures erase the distinction.
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  DensityMatrix basis_mix = mix({basis_ket(2, 0), basis_ket(2, 1)}, w);

  Eigen::VectorXd m(2), zero(2), pi_arg(2);
  m << 1.0, 1.0;
  zero << 0.0, 0.0;
  pi_arg << 0.0, M_PI;
  DensityMatrix sup_mix =
      mix({ket_from_polar(m, zero), ket_from_polar(m, pi_arg)}, w);

  CHECK((basis_mix.entries - 0.5 * Eigen::MatrixXcd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((basis_mix.entries - sup_mix.entries).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(purity(basis_mix) == doctest::Approx(0.5));
}

TEST_CASE("mix validates weights") {
  Eigen::VectorXd bad(2);
  bad << 0.7, 0.2;  // sums to 0.9
  CHECK_THROWS(mix({basis_ket(2, 0), basis_ket(2, 1)}, bad));
  Eigen::VectorXd neg(2);
  neg << 1.5, -0.5;
  CHECK_THROWS(mix({basis_ket(2, 0), basis_ket(2, 1)}, neg));
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK_THROWS(mix({basis_ket(2, 0), basis_ket(3, 0)},
                   Eigen::VectorXd::Constant(2, 0.5)));
  CHECK_THROWS(mix(std::vector<Ket>{}, Eigen::VectorXd{}));
}

TEST_CASE("born_probability matches the explicit oracle") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 5;
    std::vector<Ket> states = {random_ket(rng, dim), random_ket(rng, dim)};
    Eigen::VectorXd w(2);
    w << 0.3, 0.7;
    DensityMatrix rho = mix(states, w);
    Ket v = random_ket(rng, dim);
    CHECK(born_probability(rho, v) ==
          doctest::Approx(born_oracle(rho, v)).epsilon(1e-12));
  }
  // measuring a pure state against itself -> probability 1
  Ket k = random_ket(rng, 4);
  CHECK(born_probability(pure_density(k), k) == doctest::Approx(1.0));
}

TEST_CASE("measure_all and post_measurement_ensemble") {
  std::mt19937 rng(9);
  DensityMatrix rho = pure_density(random_ket(rng, 3));
  std::vector<Ket> eig = {random_ket(rng, 3), random_ket(rng, 3),
                          random_ket(rng, 3)};
  Eigen::VectorXd p = measure_all(rho, eig);
  REQUIRE(p.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(p[i] >= 0.0);
    CHECK(p[i] == doctest::Approx(born_oracle(rho, eig[i])).epsilon(1e-12));
  }
  DensityMatrix post = post_measurement_ensemble(p, eig);
  post.assert_valid();  // renormalized even for non-orthogonal eigenstates
}

TEST_CASE("partial_trace matches a hand-built two-qubit example") {
  // |psi> = (|00> + |11>)/sqrt(2): both reduced states are I/2.
  Eigen::VectorXd m = Eigen::VectorXd::Zero(4), a = Eigen::VectorXd::Zero(4);
  m[0] = 1.0;
  m[3] = 1.0;
  DensityMatrix rho = pure_density(ket_from_polar(m, a));
  rho.subsystem_dims = {2, 2};
  for (int side = 0; side < 2; ++side) {
    DensityMatrix red = partial_trace(rho, SubsystemCut{{side}});
    CHECK((red.entries - 0.5 * Eigen::MatrixXcd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial_trace of a product state recovers the factors") {
  std::mt19937 rng(17);
  Ket a = random_ket(rng, 2), b = random_ket(rng, 3), c = random_ket(rng, 2);
  DensityMatrix rho = pure_density(tensor_ket(tensor_ket(a, b), c));
  rho.subsystem_dims = {2, 3, 2};

  DensityMatrix red_b = partial_trace(rho, SubsystemCut{{1}});
  CHECK((red_b.entries - pure_density(b).entries).cwiseAbs().maxCoeff() < 1e-12);

  DensityMatrix red_ac = partial_trace(rho, SubsystemCut{{0, 2}});
  DensityMatrix expect_ac = pure_density(tensor_ket(a, c));
  CHECK((red_ac.entries - expect_ac.entries).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(red_ac.subsystem_dims == std::vector<int>{2, 2});

  // trace preserved
  CHECK(red_b.entries.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("is_separable_pure distinguishes product from entangled") {
  std::mt19937 rng(23);
  Ket a = random_ket(rng, 2), b = random_ket(rng, 2);
  Ket prod = tensor_ket(a, b);
  CHECK(is_separable_pure(prod, {2, 2}, SubsystemCut{{0}}, 1e-9));
  CHECK(is_separable_pure(prod, {2, 2}, SubsystemCut{{1}}, 1e-9));

  Eigen::VectorXd m = Eigen::VectorXd::Zero(4), ar = Eigen::VectorXd::Zero(4);
  m[0] = 1.0;
  m[3] = 1.0;
  Ket bell = ket_from_polar(m, ar);
  CHECK_FALSE(is_separable_pure(bell, {2, 2}, SubsystemCut{{0}}, 1e-9));
}

TEST_CASE("density validation catches broken matrices") {
  DensityMatrix rho = pure_density(basis_ket(2, 0));
  rho.entries(0, 1) = complex<double>(0.2, 0.0);  // not Hermitian
  CHECK_FALSE(rho.is_valid());

  DensityMatrix rho2 = pure_density(basis_ket(2, 0));
  rho2.entries(1, 1) = complex<double>(0.5, 0.0);  // trace 1.5
  CHECK_FALSE(rho2.is_valid());

  // entry pattern Hermitian + trace 1 but not PSD
  DensityMatrix rho3 = pure_density(basis_ket(2, 0));
  rho3.entries(0, 0) = 1.5;
  rho3.entries(1, 1) = -0.5;
  CHECK_FALSE(rho3.is_valid());
}

TEST_CASE("SubsystemCut::trace_out is the complement") {
  SubsystemCut cut{{0, 2}};
  CHECK(cut.trace_out(4) == std::vector<int>{1, 3});
}
