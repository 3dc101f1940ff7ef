#pragma once

#include <Eigen/Dense>

#include "adiascat/grid.hpp"
#include "adiascat/model.hpp"

namespace adiascat {

/// Single chiral channel with H_s = P + f(s) V; everything reduces to quadrature.
struct SolubleModel {
  Profile v;
  Schedule f;
  double omega = 0.1;

  SolubleModel() = default;
  SolubleModel(Profile v, Schedule f, double omega);

  /// Throws when v does not decay inside the window, i.e. the quadratures of
  /// |v| and |x v| on the window would differ from those on a doubled window.
  void validate(const Grid& grid) const;

  /// The same Hamiltonian as a one-channel matrix-potential network model.
  ScatterModel as_network() const;

  /// v = exp(-x^2), f = tanh, omega = 0.1.
  static SolubleModel default_fixture();
};

using RealField = Eigen::ArrayXd;
using ComplexField = Eigen::ArrayXcd;

namespace soluble {

/// Phi_s(x) = int f(s - omega t') v(x - t') dt'; S_d = exp(-i Phi_s).
RealField gauge_phase(const SolubleModel& model, double s, const Grid& grid);

/// exp(-i f(s) int v).
cplx frozen_S(const SolubleModel& model, double s);

/// E_d(x) = int fdot(s - omega t') v(x - t') dt'.
RealField dynamical_energy_shift(const SolubleModel& model, double s, const Grid& grid);

/// fdot(s) int v.
double frozen_energy_shift(const SolubleModel& model, double s);

/// -fdot(s) (int t v(x - t) dt) S_f(s) as a multiplication operator.
ComplexField tau_first_order(const SolubleModel& model, double s, const Grid& grid);

/// Wigner delay of the soluble model; S_f does not depend on energy.
inline double wigner_delay_soluble() { return 0.0; }

/// Applies exp(-i Phi_s) to a state.
StateVector apply_dynamical_S(const SolubleModel& model, double s, const StateVector& state);

}  // namespace soluble
}  // namespace adiascat
