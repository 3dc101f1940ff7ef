#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "adiascat/coherent.hpp"
#include "adiascat/error.hpp"
#include "adiascat/network.hpp"
#include "adiascat/soluble.hpp"
#include "oracles.hpp"

using namespace adiascat;

namespace {

const Grid kGrid(-40.0, 40.0, 4096);

ScatterModel fixture(Schedule f, double omega = 0.1) {
  return ScatterModel(MatrixPotential::two_channel_fixture(), f, omega);
}

ScatterModel single_rank_one(double kappa, Schedule lambda, double omega = 0.1) {
  return ScatterModel(RankOneCoupling{kappa, RankOneCoupling::within_channel(1, 0)}, lambda, 1, omega);
}

Schedule tanh_schedule() { return Schedule(Schedule::Kind::tanh, 1.0, 0.0); }

double reach(const ScatterModel& m) {
  const auto [a, b] = m.coupling_support();
  return std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST(NetworkZeroCoupling, EverythingIsFree) {
  const ScatterModel m = fixture(Schedule::constant(0.0));
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 1, 2, kGrid);
  EXPECT_LT((dynamical_S(m, 0.3, psi, 23.4375) - psi).norm(), 1e-12);
  EXPECT_LT((frozen_S_op(m, 0.3, kGrid)(psi) - psi).norm(), 1e-12);
  EXPECT_LT(on_shell_S(m, 0.3, 1.0).S.isIdentity(1e-14) ? 0.0 : 1.0, 0.5);
  const StateVector w = wave_operator(m, 0.3, Asymptote::incoming, 23.4375, psi, Evolution::frozen);
  EXPECT_LT((w - psi).norm(), 1e-12);
  const ScatterModel r = single_rank_one(2.0, Schedule::constant(0.0));
  EXPECT_TRUE(on_shell_S(r, 0.0, 0.5).S.isIdentity(0.0));
}

TEST(NetworkMatrix, BruteForceMatchesClosedFormInSolubleCase) {
  const SolubleModel sm(Profile({{1.0, 0.5, 1.0}}), tanh_schedule(), 0.1);
  const ScatterModel net = sm.as_network();
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 1, kGrid);
  const double T = default_scattering_time(kGrid, 0.5);
  const StateVector brute = dynamical_S(net, 0.3, psi, T);
  const StateVector closed = soluble::apply_dynamical_S(sm, 0.3, psi);
  EXPECT_LT((brute - closed).norm(), 1e-9);
}

TEST(NetworkMatrix, SingleChannelOnShellEqualsSoluble) {
  const SolubleModel sm(Profile({{1.0, 0.0, 1.0}, {-0.3, 1.0, 0.5}}), tanh_schedule(), 0.1);
  const ScatterModel net = sm.as_network();
  for (double s : {-0.5, 0.0, 0.8})
    for (double E : {-2.0, 1.0})
      EXPECT_LT(std::abs(on_shell_S(net, s, E).S(0, 0) - soluble::frozen_S(sm, s)), 1e-9);
}

TEST(NetworkMatrix, OnShellIsUnitaryAndEnergyIndependent) {
  const ScatterModel m = fixture(tanh_schedule());
  const Matrix s0 = on_shell_S(m, 0.4, 0.0).S;
  EXPECT_LT(on_shell_S(m, 0.4, 0.0).unitarity_defect(), 1e-12);
  EXPECT_LT((on_shell_S(m, 0.4, 2.5).S - s0).norm(), 1e-15);
  EXPECT_LT(wigner_delay(m, 0.4, 1.0, 1e-2).M.norm(), 1e-12);
}

TEST(NetworkMatrix, FrozenSIsIndependentOfEpochForConstantSchedule) {
  const ScatterModel m = fixture(Schedule::constant(0.7));
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 2, kGrid);
  const double T = default_scattering_time(kGrid, 0.5);
  EXPECT_LT((dynamical_S(m, 0.1, psi, T) - dynamical_S(m, 0.9, psi, T)).norm(), 1e-12);
  EXPECT_LT((dynamical_S(m, 0.1, psi, T) - frozen_S_op(m, 0.5, kGrid)(psi)).norm(), 1e-9);
}

TEST(NetworkMatrix, WaveOperatorConvergedInT) {
  const ScatterModel m = fixture(tanh_schedule());
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 1.0), 1, 2, kGrid);
  const double T = snap_to_lattice(kGrid, 14.5).first;
  for (Evolution ev : {Evolution::frozen, Evolution::dynamical}) {
    const StateVector a = wave_operator(m, 0.2, Asymptote::incoming, T, psi, ev);
    const StateVector b = wave_operator(m, 0.2, Asymptote::incoming, 2.0 * T, psi, ev);
    EXPECT_LT((a - b).norm(), 1e-8);
  }
}

TEST(NetworkMatrix, IntertwiningHolds) {
  const ScatterModel m = fixture(tanh_schedule());
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 2, kGrid);
  EXPECT_LT(intertwine_residual(m, 0.3, psi, 25.0), 1e-9);
}

TEST(NetworkRankOne, PrincipalValueMatchesDawson) {
  for (double kappa : {1.0, 2.0}) {
    const RankOneCoupling c{kappa, RankOneCoupling::within_channel(1, 0)};
    for (double E : {-3.0, -0.7, 0.0, 0.4, 2.0, 5.0})
      EXPECT_NEAR(rank_one::principal_value(c, E), oracle::principal_value(kappa, E), 1e-10)
          << "kappa=" << kappa << " E=" << E;
  }
}

TEST(NetworkRankOne, OnShellMatchesOracleAndIsUnitary) {
  const double kappa = 2.0;
  const double lambda = 0.5;
  const ScatterModel m = single_rank_one(kappa, Schedule::constant(lambda));
  for (double E = -3.0; E <= 3.0; E += 0.25) {
    const OnShellMatrix S = on_shell_S(m, 0.0, E);
    EXPECT_LT(S.unitarity_defect(), 1e-12) << "E=" << E;
    EXPECT_LT(std::abs(S.S(0, 0) - oracle::rank_one_S(kappa, lambda, E)), 1e-10) << "E=" << E;
  }
}

TEST(NetworkRankOne, CrossChannelIsUnitary) {
  const ScatterModel m(RankOneCoupling{2.0, RankOneCoupling::cross_channel(3)}, Schedule::constant(0.8), 3, 0.1);
  for (double E = -3.0; E <= 3.0; E += 0.5) EXPECT_LT(on_shell_S(m, 0.0, E).unitarity_defect(), 1e-12);
}

TEST(NetworkRankOne, WignerDelayAgainstHandDerivative) {
  const double kappa = 2.0;
  const double lambda = 0.5;
  const ScatterModel m = single_rank_one(kappa, Schedule::constant(lambda));
  for (double E : {-1.0, 0.3, 1.5}) {
    const HermitianOnShell w = wigner_delay(m, 0.0, E, 1e-2);
    const cplx expected = cplx(0.0, -1.0) * oracle::rank_one_S_prime(kappa, lambda, E) *
                          std::conj(oracle::rank_one_S(kappa, lambda, E));
    EXPECT_NEAR(std::abs(w.M(0, 0) - expected), 0.0, 1e-7);
    EXPECT_LT(w.anti_hermitian_residual, 1e-7);
    // step refinement changes nothing at this tolerance
    EXPECT_NEAR(std::abs(w.M(0, 0) - wigner_delay(m, 0.0, E, 5e-3).M(0, 0)), 0.0, 1e-7);
  }
}

TEST(NetworkRankOne, BornWignerDelay) {
  const double kappa = 2.0;
  const double lambda = 1e-3;
  const ScatterModel m = single_rank_one(kappa, Schedule::constant(lambda));
  for (double E : {-1.0, 0.5, 1.5}) {
    const double born = -2.0 * std::numbers::pi * lambda * oracle::rho_prime(kappa, E);
    const double got = wigner_delay(m, 0.0, E, 1e-2).M(0, 0).real();
    EXPECT_NEAR(got, born, 0.05 * std::abs(born)) << "E=" << E;
  }
}

TEST(NetworkRankOne, TimeDomainMatchesEnergyAverage) {
  const double kappa = 2.0;
  const double lambda = 0.5;
  const double eps = 0.5;
  const double e = 1.0;
  const ScatterModel m = single_rank_one(kappa, Schedule::constant(lambda));
  const double dx = 80.0 / 4096;
  const double T_want = coherent_support_radius(eps) + reach(m) + 12.0;
  int cells = static_cast<int>(std::ceil(2.0 * (T_want + coherent_support_radius(eps) + 12.0) / dx));
  cells += cells % 2;
  const Grid g(-0.5 * cells * dx, 0.5 * cells * dx, cells);
  const double T = snap_to_lattice(g, T_want).first;
  const StateVector psi = coherent_state(CoherentLabel(0.0, e, eps), 0, 1, g);
  const cplx got = inner(psi, dynamical_S(m, 0.0, psi, T));
  // <psi|S|psi> = int |psi^(E)|^2 S(E) dE
  auto weight = [&](double E) {
    return std::exp(-(E - e) * (E - e) / (eps * eps)) / (std::sqrt(std::numbers::pi) * eps);
  };
  const double re = oracle::integrate([&](double E) { return weight(E) * oracle::rank_one_S(kappa, lambda, E).real(); },
                                      e - 10 * eps, e + 10 * eps);
  const double im = oracle::integrate([&](double E) { return weight(E) * oracle::rank_one_S(kappa, lambda, E).imag(); },
                                      e - 10 * eps, e + 10 * eps);
  EXPECT_LT(std::abs(got - cplx(re, im)), 1e-6);
}

TEST(NetworkRankOne, PoleIsReported) {
  const double kappa = 1.0;
  const double E = 6.0;
  const RankOneCoupling c{kappa, RankOneCoupling::within_channel(1, 0)};
  const double lambda = 1.0 / oracle::principal_value(kappa, E);
  EXPECT_TRUE(rank_one::has_pole(c, lambda, 5.0, 7.0));
  EXPECT_FALSE(rank_one::has_pole(c, 0.5, -3.0, 3.0));
  EXPECT_THROW(rank_one::denominator(c, lambda, E), ValidationError);
  EXPECT_NO_THROW(rank_one::denominator(c, 0.5, 1.0));
}
