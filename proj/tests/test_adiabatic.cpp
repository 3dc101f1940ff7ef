#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "adiascat/adiabatic.hpp"
#include "adiascat/numerics.hpp"
#include "adiascat/soluble.hpp"
#include "oracles.hpp"

using namespace adiascat;

namespace {

const Grid kGrid(-40.0, 40.0, 4096);
constexpr double kS = 0.3;
constexpr double kE = 1.0;
constexpr double kEps = 0.5;

Schedule tanh_schedule() { return Schedule(Schedule::Kind::tanh, 1.0, 0.0); }

ScatterModel fixture(Schedule f = tanh_schedule(), double omega = 0.1) {
  return ScatterModel(MatrixPotential::two_channel_fixture(), f, omega);
}

SolubleModel soluble_model(double omega) { return SolubleModel(Profile({{1.0, 0.5, 1.0}}), tanh_schedule(), omega); }

StateVector packet(int channel, int channels, const Grid& g = kGrid) {
  return coherent_state(CoherentLabel(0.0, kE, kEps), channel, channels, g);
}

double reach(const ScatterModel& m) {
  const auto [a, b] = m.coupling_support();
  return std::max(std::abs(a), std::abs(b));
}

double field_time(const ScatterModel& m, double eps = kEps) { return coherent_support_radius(eps) + reach(m) + 4.0; }

// brute-force composition also needs the packet to stay in the window
double scatter_time(const ScatterModel& m) {
  return std::min(default_scattering_time(kGrid, kEps), snap_to_lattice(kGrid, field_time(m)).first);
}

}  // namespace

TEST(CoherentElement, IdentityGivesOverlap) {
  const GridOperator id = GridOperator::identity();
  const ChannelLabel a{CoherentLabel(1.5, 0.8, kEps), 0};
  const ChannelLabel b{CoherentLabel(-0.5, 1.2, kEps), 0};
  const cplx got = coherent_element(id, b, a, 1, kGrid);
  EXPECT_LT(std::abs(got - oracle::coherent_overlap(1.5, 0.8, -0.5, 1.2, kEps)), 1e-10);
  const ChannelLabel c{CoherentLabel(1.5, 0.8, kEps), 1};
  EXPECT_EQ(coherent_element(id, c, a, 2, kGrid), cplx(0.0));
}

TEST(CoherentElement, ConstantFrozenSMultipliesOverlap) {
  const SolubleModel sm(Profile({{1.0, 0.0, 1.0}}), Schedule::constant(1.0), 0.1);
  const GridOperator sf = frozen_S_op(sm.as_network(), 0.0, kGrid);
  const ChannelLabel a{CoherentLabel(1.0, 1.0, kEps), 0};
  const ChannelLabel b{CoherentLabel(0.0, 1.3, kEps), 0};
  const cplx expected = soluble::frozen_S(sm, 0.0) * oracle::coherent_overlap(1.0, 1.0, 0.0, 1.3, kEps);
  EXPECT_LT(std::abs(coherent_element(sf, b, a, 1, kGrid) - expected), 1e-10);
}

TEST(SmearedOnShell, RankOneMatchesOracleAverage) {
  const double kappa = 2.0;
  const double lambda = 0.5;
  const ScatterModel m(RankOneCoupling{kappa, RankOneCoupling::within_channel(1, 0)}, Schedule::constant(lambda), 1,
                       0.1);
  for (double eps : {0.5, 0.2}) {
    auto weight = [&](double E) {
      return std::exp(-(E - kE) * (E - kE) / (eps * eps)) / (std::sqrt(std::numbers::pi) * eps);
    };
    const double re = oracle::integrate(
        [&](double E) { return weight(E) * oracle::rank_one_S(kappa, lambda, E).real(); }, kE - 10 * eps, kE + 10 * eps);
    const double im = oracle::integrate(
        [&](double E) { return weight(E) * oracle::rank_one_S(kappa, lambda, E).imag(); }, kE - 10 * eps, kE + 10 * eps);
    EXPECT_LT(std::abs(smeared_on_shell(m, 0.0, kE, eps, 0, 0) - cplx(re, im)), 1e-9);
  }
}

TEST(SmearedOnShell, ConvergesQuadraticallyInEps) {
  const ScatterModel m(RankOneCoupling{2.0, RankOneCoupling::cross_channel(2)}, Schedule(Schedule::Kind::tanh, 0.5, 0.5),
                       2, 0.1);
  std::vector<std::pair<double, double>> pairs;
  for (double eps : {0.2, 0.1, 0.05}) pairs.emplace_back(eps, onshell_vs_frozen(m, kS, kE, eps, 0, 1).abs_error);
  EXPECT_GE(numerics::fit_slope(pairs).exponent, 1.8);
  const ErrorReport r = onshell_vs_frozen(m, kS, kE, 0.05, 0, 1);
  ASSERT_TRUE(r.predicted_bound.has_value());
  EXPECT_LE(r.abs_error, 3.0 * *r.predicted_bound);
}

TEST(FrozenEvolutionTest, MatchesPropagationAndIsUnitary) {
  const ScatterModel m = fixture();
  const StateVector psi = packet(0, 2);
  const FrozenEvolution ev(m, kS, kGrid);
  const double tau = snap_to_lattice(kGrid, 3.0).first;
  const StateVector a = ev(psi, tau);
  const StateVector b = propagate(m, psi, 0.0, tau, kS);
  EXPECT_LT((a - b).norm(), 1e-9);
  EXPECT_NEAR(a.norm(), psi.norm(), 1e-12);
  EXPECT_LT((ev(a, -tau) - psi).norm(), 1e-9);
}

TEST(AdiabaticZeroDriving, ConstantScheduleGivesZero) {
  const ScatterModel m = fixture(Schedule::constant(0.7));
  const double T = field_time(m);
  EXPECT_LT(std::abs(remainder_exact(m, kS, kE, kEps, 0, 1, scatter_time(m), kGrid)), 1e-9);
  EXPECT_EQ(adiabatic_tau(m, kS, kE, kEps, 0, 1, T, kGrid), cplx(0.0));
  const StateVector psi = packet(1, 2);
  EXPECT_LT(born_correction(m, kS, 20.0, kGrid)(psi).norm(), 1e-14);
}

TEST(AdiabaticSoluble, RemainderMatchesClosedForm) {
  for (double omega : {0.2, 0.05}) {
    const SolubleModel sm = soluble_model(omega);
    const ScatterModel net = sm.as_network();
    const StateVector psi = packet(0, 1);
    const cplx closed = inner(psi, soluble::apply_dynamical_S(sm, kS, psi)) - soluble::frozen_S(sm, kS);
    EXPECT_LT(std::abs(remainder_exact(net, kS, kE, kEps, 0, 0, scatter_time(net), kGrid) - closed), 1e-7);
  }
}

TEST(AdiabaticSoluble, TauMatchesFirstOrderField) {
  const SolubleModel sm = soluble_model(0.1);
  const ScatterModel net = sm.as_network();
  const StateVector psi = packet(0, 1);
  const ComplexField field = soluble::tau_first_order(sm, kS, kGrid);
  StateVector tpsi = psi;
  for (int i = 0; i < kGrid.size(); ++i) tpsi(0, i) *= field(i);
  const cplx expected = inner(psi, tpsi);
  const cplx got = adiabatic_tau(net, kS, kE, kEps, 0, 0, field_time(net), kGrid);
  EXPECT_LT(std::abs(got - expected), 1e-7 * std::abs(expected));
}

TEST(AdiabaticBorn, LinearizedSandwichIsTau) {
  const ScatterModel m = fixture();
  const double T = field_time(m);
  const StateVector plus = wave_operator(m, kS, Asymptote::outgoing, T, packet(0, 2), Evolution::frozen);
  const StateVector minus = wave_operator(m, kS, Asymptote::incoming, T, packet(1, 2), Evolution::frozen);
  const cplx born = inner(plus, born_correction(m, kS, coherent_support_radius(kEps) + 4.0, kGrid, true)(minus));
  const cplx tau = adiabatic_tau(m, kS, kE, kEps, 0, 1, T, kGrid);
  EXPECT_GT(std::abs(tau), 1e-3);
  EXPECT_LT(std::abs(born - cplx(0.0, -m.omega()) * tau), 1e-6 * std::abs(m.omega() * tau));
}

TEST(AdiabaticBorn, FirstOrderOfRelativeS) {
  std::vector<std::pair<double, double>> pairs;
  for (double omega : {0.2, 0.1, 0.05}) {
    const ScatterModel m = fixture(tanh_schedule(), omega);
    const double T = snap_to_lattice(kGrid, 14.0).first;
    const StateVector psi = packet(0, 2);
    const cplx rel = inner(psi, dynamical_S_relative(m, kS, psi, T)) - psi.norm() * psi.norm();
    const cplx born = inner(psi, born_correction(m, kS, T, kGrid)(psi));
    pairs.emplace_back(omega, std::abs(rel - born));
  }
  EXPECT_GE(numerics::fit_slope(pairs).exponent, 1.8);
}

TEST(AdiabaticCombined, ZeroCouplingIsExact) {
  const ScatterModel m = fixture(Schedule::constant(0.0));
  const ErrorReport r = combined_report(m, kS, kE, kEps, 1, 1, scatter_time(m), kGrid);
  EXPECT_LT(r.abs_error, 1e-12);
  EXPECT_NEAR(std::abs(r.value_exact - 1.0), 0.0, 1e-12);
}

TEST(AdiabaticCombined, SolubleWithinPredictedBound) {
  const ScatterModel net = soluble_model(0.05).as_network();
  const ErrorReport r = combined_report(net, kS, kE, kEps, 0, 0, scatter_time(net), kGrid);
  ASSERT_TRUE(r.predicted_bound.has_value());
  EXPECT_LE(r.abs_error, 3.0 * *r.predicted_bound);
  EXPECT_DOUBLE_EQ(r.params.omega, 0.05);
}

TEST(EnergyShift, OutgoingStateTrivialFunctions) {
  const Grid small(-20.0, 20.0, 256);
  const ScatterModel m = fixture();
  const double T = field_time(m, 1.0);
  EXPECT_LT(outgoing_state_check(m, kS, EnergyFunction::constant(1.0), T, small), 1e-7);
  EXPECT_LT(outgoing_state_check(m, kS, EnergyFunction::polynomial({0.2, 1.0}), T, small), 1e-7);
}

TEST(EnergyShift, ThawedTimeIndependentCase) {
  const ScatterModel m = fixture(Schedule::constant(0.6));
  const ErrorReport r = thawed_energy_shift_check(m, kS, kE, kEps, 0, 1, field_time(m), kGrid);
  EXPECT_LT(r.abs_error, 1e-9);
  EXPECT_LT(std::abs(r.value_approx), 1e-12);
}

TEST(EnergyShift, CoherentMatrixIsHermitian) {
  const ScatterModel m = fixture();
  const GridOperator ed = energy_shift_operator(m, kS, field_time(m), kGrid);
  std::vector<ChannelLabel> labels = {{CoherentLabel(0.0, 1.0, kEps), 0},
                                      {CoherentLabel(1.0, 0.5, kEps), 1},
                                      {CoherentLabel(-1.0, 1.5, kEps), 0}};
  const int n = static_cast<int>(labels.size());
  Matrix M(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) M(a, b) = coherent_element(ed, labels[a], labels[b], 2, kGrid);
  EXPECT_GT(M.norm(), 1e-3);
  EXPECT_LT((M - M.adjoint()).norm(), 1e-7);
}
