#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adiascat/coherent.hpp"
#include "adiascat/network.hpp"
#include "adiascat/operator.hpp"

namespace adiascat {

struct ChannelLabel {
  CoherentLabel label;
  int channel = 0;
};

struct ErrorParameters {
  double omega = 0.0;
  double eps = 0.0;
  double s = 0.0;
  double e = 0.0;
  int j = 0;
  int jp = 0;
};

/// Exact-vs-approximate comparison for one sweep point.
struct ErrorReport {
  cplx value_exact;
  cplx value_approx;
  double abs_error = 0.0;
  std::optional<double> predicted_bound;
  ErrorParameters params;
};

ErrorReport make_report(cplx exact, cplx approx, ErrorParameters params);

/// Bounded function of energy used as an incoming state rho(H0).
struct EnergyFunction {
  std::string name;
  std::function<double(double)> fn;

  double operator()(double E) const { return fn(E); }

  static EnergyFunction constant(double value);
  static EnergyFunction fermi(double mu, double width);
  static EnergyFunction gaussian(double center, double width);
  static EnergyFunction polynomial(std::vector<double> coefficients);
};

/// Frozen evolution e^{-i H_s tau}. Matrix potentials use
/// Omega_- e^{-i H0 tau} Omega_-^dagger with the exact local intertwiner;
/// rank-one couplings propagate.
class FrozenEvolution {
 public:
  FrozenEvolution(const ScatterModel& model, double s, const Grid& grid);
  StateVector operator()(const StateVector& state, double tau) const;

 private:
  ScatterModel model_;
  double s_;
  std::optional<LocalField> intertwiner_;
};

/// <bra| op |ket> between coherent states on the grid.
cplx coherent_element(const GridOperator& op, const ChannelLabel& bra, const ChannelLabel& ket, int channels,
                      const Grid& grid);

/// (1/(sqrt(pi) eps)) int S_jj'(s,E) exp(-(E-e)^2/eps^2) e^{-i dt e/2} e^{i dt E} dE.
cplx smeared_on_shell(const ScatterModel& model, double s, double e, double eps, int j, int jp, double dt = 0.0);

/// Smeared on-shell element vs S_jj'(s, e).
ErrorReport onshell_vs_frozen(const ScatterModel& model, double s, double e, double eps, int j, int jp);

/// <t,e,j| S_d(0) - S_f(H_s) |t,e,j'> with t = s/omega, evaluated as
/// <0,e,j| S_d(s) - S_f |0,e,j'>.
cplx remainder_exact(const ScatterModel& model, double s, double e, double eps, int j, int jp, double T,
                     const Grid& grid);

/// First-order coefficient tau(e,s;eps) with remainder ~ -i omega tau.
cplx adiabatic_tau(const ScatterModel& model, double s, double e, double eps, int j, int jp, double T,
                   const Grid& grid);

/// -i int_{-T}^{T} e^{iH_s t'} (H_{s+omega t'} - H_s) e^{-iH_s t'} dt'. With
/// `linearized`, H_{s+omega t'} - H_s is replaced by omega t' dH_s/ds.
GridOperator born_correction(const ScatterModel& model, double s, double T, const Grid& grid,
                             bool linearized = false);

/// Dynamical coherent element against S_jj'(s,e), with the predicted bound
/// eps^2 (|tau_w|^2 + |tau_w'|) + omega |tau|.
ErrorReport combined_report(const ScatterModel& model, double s, double e, double eps, int j, int jp, double T,
                            const Grid& grid);

/// E_d(s) = (H0 - S_d H0 S_d^dagger) / omega.
GridOperator energy_shift_operator(const ScatterModel& model, double s, double T, const Grid& grid);

/// |S_d rho(H0) S_d^dagger - rho(H0 - omega E_d(s))| in operator norm (dense).
/// Needs a local S_d (matrix potential) and at most 2048 unknowns.
double outgoing_state_check(const ScatterModel& model, double s, const EnergyFunction& rho, double T,
                            const Grid& grid);

/// <t,e,j| E_d(0) |t,e,j'> (t = s/omega) against i (dS/ds S^dagger)_jj'(s,e).
ErrorReport thawed_energy_shift_check(const ScatterModel& model, double s, double e, double eps, int j, int jp,
                                      double T, const Grid& grid);

}  // namespace adiascat
