#pragma once

#include "adiascat/grid.hpp"

namespace adiascat {

/// Point (t, e) of the time-energy plane with energy width eps.
struct CoherentLabel {
  double t = 0.0;
  double e = 0.0;
  double eps = 1.0;

  CoherentLabel() = default;
  CoherentLabel(double t, double e, double eps);
};

/// Position-space half-width outside which |t,e;eps> is below 1e-14.
double coherent_support_radius(double eps);

/// Momentum amplitude (E|t,e;eps> = e^{-ite/2} e^{itE} g_eps(E - e).
cplx coherent_energy_amplitude(const CoherentLabel& label, double energy);

/// Position amplitude e^{ite/2} e^{iex} (eps^2/pi)^{1/4} exp(-eps^2 (x+t)^2 / 2).
cplx coherent_position_amplitude(const CoherentLabel& label, double x);

/// |t,e;eps> placed in `channel` of a `channels`-component state. The packet
/// (centred at x = -t) must fit inside the window with its full support.
StateVector coherent_state(const CoherentLabel& label, int channel, int channels, const Grid& grid);

/// Closed form exp(-(e-e')^2/4eps^2) exp(-eps^2 (t-t')^2/4) exp(-i(e t' - e' t)/2).
/// Equals the grid inner product <b|a>.
cplx overlap(const CoherentLabel& a, const CoherentLabel& b);

/// e^{-i H0 t'} with a check that the shifted support stays in the window.
StateVector free_shift(const StateVector& state, double t_shift);

/// Relative residual of the discretised resolution of the identity
/// (1/2pi) sum dt de |t,e><t,e| over the box |t| <= t_range, |e| <= e_range.
double identity_resolution_residual(const Grid& grid, double eps, const StateVector& probe,
                                    double t_range, double e_range, int n_t, int n_e);

/// Position and energy standard deviations of a state (channels summed).
struct Spread {
  double mean_x = 0.0;
  double sigma_x = 0.0;
  double mean_e = 0.0;
  double sigma_e = 0.0;
};
Spread measure_spread(const StateVector& state);

}  // namespace adiascat
