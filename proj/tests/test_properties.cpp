// Seeded randomized checks of the library invariants.
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "adiascat/adiabatic.hpp"
#include "adiascat/numerics.hpp"
#include "adiascat/soluble.hpp"

using namespace adiascat;

namespace {

const Grid kGrid(-40.0, 40.0, 4096);
const double kSqrtPi = std::sqrt(std::numbers::pi);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }
  cplx complex() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

 private:
  std::mt19937_64 engine_;
};

Schedule tanh_schedule() { return Schedule(Schedule::Kind::tanh, 1.0, 0.0); }

Matrix random_hermitian(Rng& rng, int n) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) a(i, k) = rng.complex();
  return 0.5 * (a + a.adjoint());
}

Profile random_profile(Rng& rng, int bumps) {
  std::vector<GaussianBump> out;
  for (int k = 0; k < bumps; ++k) out.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0), rng.uniform(0.5, 1.5)});
  return Profile(out);
}

double closed_weight(const Profile& p) {
  double w = 0.0;
  for (const GaussianBump& b : p.bumps()) w += b.height * b.width * kSqrtPi;
  return w;
}

// superposition of a few packets near the origin: smooth and band limited
StateVector random_smooth(Rng& rng, int channels) {
  StateVector v(kGrid, channels);
  for (int k = 0; k < 4; ++k) {
    const CoherentLabel l(rng.uniform(-3.0, 3.0), rng.uniform(-2.0, 2.0), rng.uniform(0.5, 1.0));
    v += rng.complex() * coherent_state(l, rng.index(channels), channels, kGrid);
  }
  v *= 1.0 / v.norm();
  return v;
}

StateVector multiply(const StateVector& v, const Eigen::ArrayXcd& field) {
  StateVector out = v;
  for (int i = 0; i < kGrid.size(); ++i) out.amplitudes().col(i) *= field(i);
  return out;
}

}  // namespace

TEST(Properties, OrderedExponentialIsUnitary) {
  Rng rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + rng.index(8);
    const Matrix a = random_hermitian(rng, n);
    const Matrix b = random_hermitian(rng, n);
    const double w = rng.uniform(0.5, 3.0);
    auto path = [&](double u) -> Matrix { return cplx(0.0, -1.0) * (std::cos(w * u) * a + u * b); };
    const int steps = 200 + rng.index(9800);
    const Matrix U = numerics::ordered_exponential(path, 0.0, 2.0, steps);
    EXPECT_LT((U.adjoint() * U - Matrix::Identity(n, n)).norm(), 1e-10) << "n=" << n << " steps=" << steps;
  }
}

TEST(Properties, OddIntegrandsVanish) {
  Rng rng(12);
  const double dx = 0.01;
  const int n = 2001;  // symmetric lattice on [-10, 10]
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.uniform(-2.0, 2.0);
    const double c = rng.uniform(0.1, 2.0);
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) {
      const double x = -10.0 + i * dx;
      samples[i] = (a * x + std::pow(x, 3)) * std::exp(-c * x * x);
    }
    EXPECT_LE(std::abs(numerics::quadrature(samples, dx)), 1e-12);
  }
}

TEST(Properties, SolubleGaugeIdentityOnRandomVectors) {
  Rng rng(21);
  const SolubleModel m(random_profile(rng, 2), tanh_schedule(), 0.1);
  const double s = 0.25;
  const Eigen::ArrayXd phi = soluble::gauge_phase(m, s, kGrid);
  const Eigen::ArrayXcd S = (cplx(0.0, -1.0) * phi.cast<cplx>()).exp();
  const Eigen::ArrayXcd shift = soluble::dynamical_energy_shift(m, s, kGrid).cast<cplx>();
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector v = random_smooth(rng, 1);
    const StateVector lhs = multiply(apply_h0(multiply(v, S.conjugate())), S);
    const StateVector rhs = apply_h0(v) - m.omega * multiply(v, shift);
    EXPECT_LT((lhs - rhs).norm() / apply_h0(v).norm(), 1e-7);
  }
}

TEST(Properties, SolubleClosedFormMatchesPropagation) {
  Rng rng(22);
  for (double omega : {0.2, 0.1}) {
    const SolubleModel m(random_profile(rng, 2), tanh_schedule(), omega);
    const double s = rng.uniform(-0.5, 0.5);
    const StateVector psi = coherent_state(CoherentLabel(0.0, rng.uniform(0.5, 1.5), 0.5), 0, 1, kGrid);
    const StateVector brute = dynamical_S(m.as_network(), s, psi, default_scattering_time(kGrid, 0.5));
    EXPECT_LT((brute - soluble::apply_dynamical_S(m, s, psi)).norm(), 1e-6) << "omega=" << omega;
  }
}

TEST(Properties, FrozenSDependsOnlyOnWeight) {
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const Profile a = random_profile(rng, 2);
    const Profile b0 = random_profile(rng, 3);
    const Profile b = b0.scaled(closed_weight(a) / closed_weight(b0));
    const double s = rng.uniform(-1.0, 1.0);
    const SolubleModel ma(a, tanh_schedule(), 0.1);
    const SolubleModel mb(b, tanh_schedule(), 0.1);
    EXPECT_LT(std::abs(soluble::frozen_S(ma, s) - soluble::frozen_S(mb, s)), 1e-12);
  }
}

TEST(Properties, FrozenDataDoNotFixFirstOrderError) {
  // same weight, different first moment
  const SolubleModel a(Profile({{1.0, 0.0, 1.0}}), tanh_schedule(), 0.1);
  const SolubleModel b(Profile({{1.0, 1.5, 1.0}}), tanh_schedule(), 0.1);
  const double s = 0.3;
  EXPECT_LT(std::abs(soluble::frozen_S(a, s) - soluble::frozen_S(b, s)), 1e-12);
  const ComplexField ta = soluble::tau_first_order(a, s, kGrid);
  const ComplexField tb = soluble::tau_first_order(b, s, kGrid);
  EXPECT_GT(std::sqrt(kGrid.dx()) * (ta - tb).matrix().norm(), 1e-3);
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 1, kGrid);
  auto remainder = [&](const SolubleModel& m) {
    return inner(psi, soluble::apply_dynamical_S(m, s, psi)) - soluble::frozen_S(m, s);
  };
  EXPECT_GT(std::abs(remainder(a) - remainder(b)), 1e-6);
}

TEST(Properties, RemainderOverOmegaConvergesToTau) {
  const SolubleModel base(Profile({{1.0, 0.5, 1.0}}), tanh_schedule(), 0.1);
  const double s = 0.3;
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 1, kGrid);
  std::vector<double> ratio;
  for (double omega : {0.04, 0.02, 0.01}) {
    const SolubleModel m(base.v, base.f, omega);
    ratio.push_back(std::abs(inner(psi, soluble::apply_dynamical_S(m, s, psi)) - soluble::frozen_S(m, s)) / omega);
  }
  EXPECT_LT(std::abs(ratio[1] / ratio[0] - 1.0), 0.1);
  EXPECT_LT(std::abs(ratio[2] / ratio[1] - 1.0), 0.1);
  const cplx tau = adiabatic_tau(base.as_network(), s, 1.0, 0.5, 0, 0, 22.0, kGrid);
  EXPECT_LT(std::abs(ratio[2] - std::abs(tau)), 0.05 * std::abs(tau));
}

TEST(Properties, MatrixModelsAreUnitary) {
  Rng rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 2 + rng.index(2);
    const MatrixPotential pot(n, {{random_hermitian(rng, n), random_profile(rng, 1)},
                                  {random_hermitian(rng, n), random_profile(rng, 1)}});
    const ScatterModel m(pot, tanh_schedule(), rng.uniform(0.05, 0.2));
    const double s = rng.uniform(-1.0, 1.0);
    for (double E : {-2.0, 0.0, 1.7}) EXPECT_LT(on_shell_S(m, s, E).unitarity_defect(), 1e-8);
    EXPECT_LT((on_shell_S(m, s, -2.0).S - on_shell_S(m, s, 1.7).S).norm(), 1e-8);
    const StateVector psi = coherent_state(CoherentLabel(0.0, rng.uniform(0.5, 1.5), 1.0), rng.index(n), n, kGrid);
    EXPECT_NEAR(dynamical_S(m, s, psi, default_scattering_time(kGrid, 1.0)).norm(), 1.0, 1e-8);
  }
}

TEST(Properties, RankOneOnShellIsUnitary) {
  Rng rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 1 + rng.index(4);
    const ScatterModel m(RankOneCoupling{rng.uniform(1.0, 3.0), RankOneCoupling::cross_channel(n)},
                         Schedule::constant(rng.uniform(-0.5, 0.5)), n, 0.1);
    for (int k = 0; k < 10; ++k) EXPECT_LT(on_shell_S(m, 0.0, rng.uniform(-3.0, 3.0)).unitarity_defect(), 1e-8);
  }
}

TEST(Properties, FrozenWaveOperatorsIgnoreBasePoint) {
  Rng rng(33);
  const ScatterModel m(MatrixPotential::two_channel_fixture(), Schedule::constant(0.8), 0.1);
  const double T = snap_to_lattice(kGrid, 30.0).first;
  const GridOperator wa = wave_operator_op(m, -0.4, Asymptote::incoming, T, kGrid, Evolution::dynamical);
  const GridOperator wb = wave_operator_op(m, 0.6, Asymptote::incoming, T, kGrid, Evolution::dynamical);
  for (int trial = 0; trial < 10; ++trial) {
    const CoherentLabel l(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 1.5), 0.5);
    const StateVector psi = coherent_state(l, rng.index(2), 2, kGrid);
    EXPECT_LT((wa(psi) - wb(psi)).norm(), 1e-8);
  }
}

TEST(Properties, ReferenceHamiltonianChange) {
  Rng rng(34);
  const ScatterModel m(MatrixPotential::two_channel_fixture(), tanh_schedule(), 0.1);
  const double T = default_scattering_time(kGrid, 0.5);
  for (int trial = 0; trial < 2; ++trial) {
    const double s = rng.uniform(-0.5, 0.5);
    const StateVector psi = coherent_state(CoherentLabel(0.0, rng.uniform(0.5, 1.5), 0.5), rng.index(2), 2, kGrid);
    const StateVector direct = dynamical_S(m, s, psi, T);
    const StateVector in = wave_operator(m, s, Asymptote::incoming, T, psi, Evolution::frozen);
    const StateVector rel = dynamical_S_relative(m, s, in, T);
    const StateVector composed = wave_operator_adjoint(m, s, Asymptote::outgoing, T, rel, Evolution::frozen);
    EXPECT_LT((direct - composed).norm(), 1e-6);
  }
}

TEST(Properties, EnergyShiftGeneratesEpochDerivative) {
  // dS_d/ds = -i E_d S_d with E_d = (H0 - S_d H0 S_d^dagger)/omega
  Rng rng(35);
  const ScatterModel m(MatrixPotential::two_channel_fixture(), tanh_schedule(), 0.1);
  const double T = 28.0;
  const double s = 0.2;
  const double h = 1e-2;
  auto S = [&](double q) { return dynamical_S_op(m, q, T, kGrid); };
  const GridOperator Sp = S(s + h), Sm = S(s - h), Sp2 = S(s + 0.5 * h), Sm2 = S(s - 0.5 * h), S0 = S(s);
  const GridOperator Ed = energy_shift_operator(m, s, T, kGrid);
  for (int trial = 0; trial < 3; ++trial) {
    const StateVector psi = coherent_state(CoherentLabel(rng.uniform(-1.0, 1.0), 1.0, 0.5), rng.index(2), 2, kGrid);
    const StateVector coarse = (1.0 / (2.0 * h)) * (Sp(psi) - Sm(psi));
    const StateVector fine = (1.0 / h) * (Sp2(psi) - Sm2(psi));
    const StateVector d = (1.0 / 3.0) * (cplx(4.0) * fine - coarse);
    const StateVector expected = cplx(0.0, -1.0) * Ed(S0(psi));
    EXPECT_LT((d - expected).norm(), 1e-6);
  }
}
