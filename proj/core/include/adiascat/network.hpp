#pragma once

#include <optional>

#include "adiascat/coherent.hpp"
#include "adiascat/grid.hpp"
#include "adiascat/model.hpp"
#include "adiascat/operator.hpp"

namespace adiascat {

/// Unitary channel matrix S(s, E).
struct OnShellMatrix {
  double s = 0.0;
  double E = 0.0;
  Matrix S;

  double unitarity_defect() const;
};

/// Hermitised derivative matrix (Wigner delay or frozen energy shift) together
/// with the anti-Hermitian part that finite differencing left behind.
struct HermitianOnShell {
  double s = 0.0;
  double E = 0.0;
  Matrix M;
  double anti_hermitian_residual = 0.0;
};

enum class Evolution { dynamical, frozen };
enum class Asymptote { incoming, outgoing };  ///< Omega_- and Omega_+

/// H_s psi = H0 psi + coupling(s) psi.
StateVector apply_hamiltonian(const ScatterModel& model, double s, const StateVector& state);
/// dH_s/ds psi.
StateVector apply_hamiltonian_rate(const ScatterModel& model, double s, const StateVector& state);

/// U(t1, t0) for H(t) = H_{omega t}, or for the frozen H_{s} when `frozen_at`
/// is given. Matrix potentials: exact transport along characteristics, with the
/// duration snapped to the dx lattice (`applied_duration` receives the snap).
/// Rank-one couplings: interaction-picture RK4.
StateVector propagate(const ScatterModel& model, const StateVector& state, double t0, double t1,
                      std::optional<double> frozen_at = std::nullopt,
                      double* applied_duration = nullptr);

/// Default wave-operator time: window half-length minus packet radius 8/eps,
/// snapped to the lattice.
double default_scattering_time(const Grid& grid, double eps);

/// Omega_{+-}(s; H, H0) psi, realised as U(t, t -+ T) U0(-+T) psi with t = s/omega.
StateVector wave_operator(const ScatterModel& model, double s, Asymptote which, double T,
                          const StateVector& state, Evolution evolution = Evolution::dynamical);
/// Omega^dagger psi.
StateVector wave_operator_adjoint(const ScatterModel& model, double s, Asymptote which, double T,
                                  const StateVector& state,
                                  Evolution evolution = Evolution::dynamical);
GridOperator wave_operator_op(const ScatterModel& model, double s, Asymptote which, double T,
                              const Grid& grid, Evolution evolution);

/// S_d(s; H, H0) psi by brute-force composition U0(-T) U(t+T, t-T) U0(-T).
StateVector dynamical_S(const ScatterModel& model, double s, const StateVector& state, double T);
/// S_d(s; H, H0) as an operator. Matrix potentials give a local field.
GridOperator dynamical_S_op(const ScatterModel& model, double s, double T, const Grid& grid);
/// S_f(H_s, H0) as an operator.
GridOperator frozen_S_op(const ScatterModel& model, double s, const Grid& grid);

/// S_d(s; H, H_s) psi: dynamical S relative to the frozen reference H_s,
/// e^{iH_s T} U(t+T, t-T) e^{iH_s T}.
StateVector dynamical_S_relative(const ScatterModel& model, double s, const StateVector& state,
                                 double T);

/// Local-field representation T exp(-i int_{u0}^{u1} f(s + w u) v(x + u) du) for
/// matrix potentials; w = omega or 0 (frozen).
LocalField characteristic_field(const ScatterModel& model, double s, double u0, double u1,
                                const Grid& grid, Evolution evolution);

OnShellMatrix on_shell_S(const ScatterModel& model, double s, double E);
HermitianOnShell wigner_delay(const ScatterModel& model, double s, double E, double h);
HermitianOnShell frozen_energy_shift_onshell(const ScatterModel& model, double s, double E,
                                             double h);

/// |H_s Omega psi - Omega H0 psi| / |psi| for the frozen wave operator.
double intertwine_residual(const ScatterModel& model, double s, const StateVector& state, double T,
                           Asymptote which = Asymptote::incoming);

/// |i omega dOmega/ds - (H_s Omega - Omega H0)| psi / |psi| for the
/// dynamical wave operator, dOmega/ds by central difference with step h.
double omega_dot_residual(const ScatterModel& model, double s, const StateVector& state, double T,
                          double h, Asymptote which = Asymptote::incoming);

/// Rank-one resolvent pieces (exposed for tests and validation).
namespace rank_one {
/// PV int rho(k)/(E-k) dk via the subtraction trick.
double principal_value(const RankOneCoupling& c, double E);
/// g(E) = PV - i pi rho(E).
cplx resolvent(const RankOneCoupling& c, double E);
/// 1 - lambda g(E); throws ValidationError within 1e-12 of zero.
cplx denominator(const RankOneCoupling& c, double lambda, double E);
/// Scans E in [e_lo, e_hi] for |1 - lambda g(E)| < tol.
bool has_pole(const RankOneCoupling& c, double lambda, double e_lo, double e_hi, double tol = 1e-3);
}  // namespace rank_one

}  // namespace adiascat
