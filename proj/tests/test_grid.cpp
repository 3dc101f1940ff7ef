#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "adiascat/coherent.hpp"
#include "adiascat/error.hpp"
#include "adiascat/grid.hpp"

using namespace adiascat;

TEST(Grid, SpacingAndParity) {
  const Grid g(-40.0, 40.0, 4096);
  EXPECT_DOUBLE_EQ(g.dx(), 80.0 / 4096);
  EXPECT_DOUBLE_EQ(g.x(0), -40.0);
  EXPECT_THROW(Grid(-1.0, 1.0, 7), ValidationError);
  EXPECT_THROW(Grid(1.0, -1.0, 8), ValidationError);
  EXPECT_THROW(Grid(0.0, 1.0, 0), ValidationError);
}

TEST(Grid, MomentumOrderingNyquistZero) {
  const Grid g(0.0, 2.0 * std::numbers::pi, 8);
  EXPECT_DOUBLE_EQ(g.momentum(0), 0.0);
  EXPECT_DOUBLE_EQ(g.momentum(1), 1.0);
  EXPECT_DOUBLE_EQ(g.momentum(3), 3.0);
  EXPECT_DOUBLE_EQ(g.momentum(4), 0.0);
  EXPECT_DOUBLE_EQ(g.momentum(5), -3.0);
  EXPECT_DOUBLE_EQ(g.momentum(7), -1.0);
}

TEST(Grid, InnerIsConjugateLinearInFirstArgument) {
  const Grid g(-20.0, 20.0, 512);
  const StateVector a = coherent_state(CoherentLabel(0.5, 1.0, 1.0), 0, 1, g);
  const StateVector b = coherent_state(CoherentLabel(-0.5, 0.5, 1.0), 0, 1, g);
  const cplx z(0.3, 0.7);
  EXPECT_LT(std::abs(inner(z * a, b) - std::conj(z) * inner(a, b)), 1e-14);
  EXPECT_LT(std::abs(inner(a, z * b) - z * inner(a, b)), 1e-14);
}

TEST(Grid, H0OnPlaneWaveGivesMomentum) {
  const Grid g(-20.0, 20.0, 512);
  StateVector w(g, 1);
  const double k = 2.0 * std::numbers::pi * 5 / g.length();
  for (int i = 0; i < g.size(); ++i) w(0, i) = std::exp(cplx(0.0, k * g.x(i)));
  const StateVector h = apply_h0(w);
  EXPECT_LT((h - cplx(k, 0.0) * w).norm() / w.norm(), 1e-12);
}

TEST(Grid, FreeEvolveLatticeAndSpectralAgree) {
  const Grid g(-40.0, 40.0, 2048);
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 1, g);
  const double t = 37 * g.dx();
  const StateVector lattice = free_evolve(psi, t);
  const StateVector spectral = free_evolve(free_evolve(psi, t + 0.3 * g.dx()), -0.3 * g.dx());
  EXPECT_LT((lattice - spectral).norm(), 1e-10);
  // translation to the right
  const Spread sp = measure_spread(lattice);
  EXPECT_NEAR(sp.mean_x, t, 1e-8);
}

TEST(Grid, SnapToLattice) {
  const Grid g(-1.0, 1.0, 20);
  const auto [t, m] = snap_to_lattice(g, 0.33);
  EXPECT_EQ(m, 3);
  EXPECT_NEAR(t, 0.3, 1e-15);
}

TEST(Grid, EnergyAmplitudeOfGaussian) {
  // (E|psi) for psi = pi^{-1/4} e^{-x^2/2} is pi^{-1/4} e^{-E^2/2}
  const Grid g(-30.0, 30.0, 1024);
  StateVector psi(g, 1);
  for (int i = 0; i < g.size(); ++i) psi(0, i) = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * g.x(i) * g.x(i));
  for (double E : {0.0, 0.7, -1.5})
    EXPECT_NEAR(std::abs(energy_amplitude(psi, 0, E) - std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * E * E)),
                0.0, 1e-12);
}
