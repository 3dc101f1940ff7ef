#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "adiascat/grid.hpp"

namespace adiascat {

/// Slow driving f(s) = offset + amplitude * g(s) with closed-form derivative.
class Schedule {
 public:
  enum class Kind { constant, tanh, gaussian_bump, smooth_step };

  Schedule() = default;
  Schedule(Kind kind, double amplitude, double offset = 0.0)
      : kind_(kind), amplitude_(amplitude), offset_(offset) {}

  static Schedule constant(double value) { return {Kind::constant, 0.0, value}; }

  double value(double s) const;
  double rate(double s) const;  ///< df/ds
  double operator()(double s) const { return value(s); }

  Kind kind() const noexcept { return kind_; }
  double amplitude() const noexcept { return amplitude_; }
  double offset() const noexcept { return offset_; }
  bool is_constant() const noexcept { return kind_ == Kind::constant || amplitude_ == 0.0; }

 private:
  Kind kind_ = Kind::constant;
  double amplitude_ = 0.0;
  double offset_ = 0.0;
};

Schedule::Kind parse_schedule_kind(std::string_view name);
std::string_view to_string(Schedule::Kind kind);

/// height * exp(-((x - center)/width)^2)
struct GaussianBump {
  double height = 1.0;
  double center = 0.0;
  double width = 1.0;

  double operator()(double x) const;
  /// Half-width beyond which the bump is below 1e-16 of its height.
  double radius() const;
};

/// Real potential profile built from Gaussian bumps.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<GaussianBump> bumps);

  double operator()(double x) const;
  const std::vector<GaussianBump>& bumps() const noexcept { return bumps_; }
  bool empty() const noexcept { return bumps_.empty(); }

  /// Interval carrying the profile (each bump cut where it drops below 1e-16).
  std::pair<double, double> support() const;

  /// int v dx by trapezoid quadrature on a fine lattice over the support.
  double weight() const;
  /// int x v dx, same quadrature.
  double first_moment() const;

  Profile scaled(double factor) const;

 private:
  std::vector<GaussianBump> bumps_;
};

/// v(x) = sum_k C_k p_k(x) with C_k Hermitian n x n.
class MatrixPotential {
 public:
  struct Term {
    Matrix coefficient;
    Profile profile;
  };

  MatrixPotential() = default;
  MatrixPotential(int channels, std::vector<Term> terms);

  int channels() const noexcept { return channels_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  Matrix at(double x) const;
  std::pair<double, double> support() const;

  /// v11 = 0.8 e^{-(x+0.5)^2}, v22 = -0.5 e^{-(x-0.5)^2}, v12 = v21 = 0.6 e^{-x^2}.
  static MatrixPotential two_channel_fixture();

 private:
  int channels_ = 1;
  std::vector<Term> terms_;
};

/// Separable coupling lambda(s) |chi><chi| (x) |c><c| with a normalised
/// Gaussian form factor chi(x) = (kappa^2/pi)^{1/4} exp(-kappa^2 x^2 / 2).
struct RankOneCoupling {
  double kappa = 1.0;
  Vector channel_vector;  ///< unit vector c in channel space

  double chi(double x) const;
  /// Unitary Fourier transform chi^(k) = (pi kappa^2)^{-1/4} exp(-k^2/(2 kappa^2)).
  double chi_hat(double k) const;
  double spectral_density(double k) const { return chi_hat(k) * chi_hat(k); }
  double radius() const;

  /// c = (1,...,1)/sqrt(n) for cross-channel coupling, e_j within channel j.
  static Vector cross_channel(int channels);
  static Vector within_channel(int channels, int j);
};

/// Chiral n-channel scattering model H(t) = H0 + coupling at epoch s = omega t.
class ScatterModel {
 public:
  using Coupling = std::variant<MatrixPotential, RankOneCoupling>;

  ScatterModel(MatrixPotential potential, Schedule schedule, double omega);
  ScatterModel(RankOneCoupling coupling, Schedule lambda, int channels, double omega);

  int channels() const noexcept { return channels_; }
  double omega() const noexcept { return omega_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  const Coupling& coupling() const noexcept { return coupling_; }
  bool is_rank_one() const noexcept { return std::holds_alternative<RankOneCoupling>(coupling_); }
  const MatrixPotential& potential() const { return std::get<MatrixPotential>(coupling_); }
  const RankOneCoupling& rank_one() const { return std::get<RankOneCoupling>(coupling_); }

  ScatterModel with_omega(double omega) const;
  ScatterModel with_schedule(Schedule schedule) const;

  /// Interval outside of which the coupling vanishes to double precision.
  std::pair<double, double> coupling_support() const;

 private:
  Coupling coupling_;
  Schedule schedule_;
  int channels_;
  double omega_;
};

}  // namespace adiascat
