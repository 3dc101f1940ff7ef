#include "adiascat/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adiascat/error.hpp"
#include "adiascat/numerics.hpp"

namespace adiascat {

namespace {
// exp(-r^2) < 1e-16
const double kBumpCut = std::sqrt(16.0 * std::log(10.0));
}  // namespace

double Schedule::value(double s) const {
  switch (kind_) {
    case Kind::constant:
      return offset_ + amplitude_;
    case Kind::tanh:
      return offset_ + amplitude_ * std::tanh(s);
    case Kind::gaussian_bump:
      return offset_ + amplitude_ * std::exp(-s * s);
    case Kind::smooth_step:
      return offset_ + amplitude_ * 0.5 * (1.0 + std::erf(s));
  }
  return offset_;
}

double Schedule::rate(double s) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::tanh: {
      const double c = std::cosh(s);
      return amplitude_ / (c * c);
    }
    case Kind::gaussian_bump:
      return -2.0 * s * amplitude_ * std::exp(-s * s);
    case Kind::smooth_step:
      return amplitude_ * std::exp(-s * s) / std::sqrt(std::numbers::pi);
  }
  return 0.0;
}

Schedule::Kind parse_schedule_kind(std::string_view name) {
  if (name == "constant") return Schedule::Kind::constant;
  if (name == "tanh") return Schedule::Kind::tanh;
  if (name == "gaussian" || name == "gaussian-bump") return Schedule::Kind::gaussian_bump;
  if (name == "smooth-step" || name == "smoothstep") return Schedule::Kind::smooth_step;
  throw ValidationError("schedule", "unknown schedule '" + std::string(name) + "'");
}

std::string_view to_string(Schedule::Kind kind) {
  switch (kind) {
    case Schedule::Kind::constant:
      return "constant";
    case Schedule::Kind::tanh:
      return "tanh";
    case Schedule::Kind::gaussian_bump:
      return "gaussian-bump";
    case Schedule::Kind::smooth_step:
      return "smooth-step";
  }
  return "constant";
}

double GaussianBump::operator()(double x) const {
  const double u = (x - center) / width;
  return height * std::exp(-u * u);
}

double GaussianBump::radius() const { return kBumpCut * width; }

Profile::Profile(std::vector<GaussianBump> bumps) : bumps_(std::move(bumps)) {
  for (const auto& b : bumps_) {
    if (!(b.width > 0.0) || !std::isfinite(b.height) || !std::isfinite(b.center))
      throw ValidationError("profile", "bump needs finite height/center and positive width");
  }
}

double Profile::operator()(double x) const {
  double v = 0.0;
  for (const auto& b : bumps_) v += b(x);
  return v;
}

std::pair<double, double> Profile::support() const {
  if (bumps_.empty()) return {0.0, 0.0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& b : bumps_) {
    lo = std::min(lo, b.center - b.radius());
    hi = std::max(hi, b.center + b.radius());
  }
  return {lo, hi};
}

namespace {

template <class F>
double integrate_over(const Profile& p, F&& weight_fn) {
  if (p.empty()) return 0.0;
  const auto [lo, hi] = p.support();
  const int n = 2 * static_cast<int>(std::ceil((hi - lo) / 0.004 / 2.0)) + 2;
  const double h = (hi - lo) / n;
  std::vector<double> samples(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    samples[i] = weight_fn(x) * p(x);
  }
  return numerics::quadrature(std::span<const double>(samples), h);
}

}  // namespace

double Profile::weight() const {
  return integrate_over(*this, [](double) { return 1.0; });
}

double Profile::first_moment() const {
  return integrate_over(*this, [](double x) { return x; });
}

Profile Profile::scaled(double factor) const {
  auto bumps = bumps_;
  for (auto& b : bumps) b.height *= factor;
  return Profile(std::move(bumps));
}

MatrixPotential::MatrixPotential(int channels, std::vector<Term> terms)
    : channels_(channels), terms_(std::move(terms)) {
  if (channels < 1) throw ValidationError("channels", "must be positive");
  for (const auto& t : terms_) {
    if (t.coefficient.rows() != channels || t.coefficient.cols() != channels)
      throw ValidationError("potential", "coefficient shape does not match channel count");
    if ((t.coefficient - t.coefficient.adjoint()).norm() > 1e-14 * std::max(1.0, t.coefficient.norm()))
      throw ValidationError("potential", "coefficient matrix is not Hermitian");
  }
}

Matrix MatrixPotential::at(double x) const {
  Matrix v = Matrix::Zero(channels_, channels_);
  for (const auto& t : terms_) v += t.profile(x) * t.coefficient;
  return v;
}

MatrixPotential MatrixPotential::two_channel_fixture() {
  Matrix c11 = Matrix::Zero(2, 2);
  c11(0, 0) = 1.0;
  Matrix c22 = Matrix::Zero(2, 2);
  c22(1, 1) = 1.0;
  Matrix c12 = Matrix::Zero(2, 2);
  c12(0, 1) = c12(1, 0) = 1.0;
  return MatrixPotential(2, {{c11, Profile({{0.8, -0.5, 1.0}})},
                             {c22, Profile({{-0.5, 0.5, 1.0}})},
                             {c12, Profile({{0.6, 0.0, 1.0}})}});
}

std::pair<double, double> MatrixPotential::support() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& t : terms_) {
    if (t.profile.empty()) continue;
    const auto [a, b] = t.profile.support();
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

double RankOneCoupling::chi(double x) const {
  return std::pow(kappa * kappa / std::numbers::pi, 0.25) * std::exp(-0.5 * kappa * kappa * x * x);
}

double RankOneCoupling::chi_hat(double k) const {
  return std::pow(std::numbers::pi * kappa * kappa, -0.25) * std::exp(-0.5 * k * k / (kappa * kappa));
}

double RankOneCoupling::radius() const { return std::sqrt(2.0) * kBumpCut / kappa; }

Vector RankOneCoupling::cross_channel(int channels) {
  return Vector::Constant(channels, 1.0 / std::sqrt(static_cast<double>(channels)));
}

Vector RankOneCoupling::within_channel(int channels, int j) {
  if (j < 0 || j >= channels) throw ValidationError("channel", "index out of range");
  Vector c = Vector::Zero(channels);
  c(j) = 1.0;
  return c;
}

ScatterModel::ScatterModel(MatrixPotential potential, Schedule schedule, double omega)
    : coupling_(std::move(potential)), schedule_(schedule), omega_(omega) {
  channels_ = std::get<MatrixPotential>(coupling_).channels();
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega", "must be positive");
}

ScatterModel::ScatterModel(RankOneCoupling coupling, Schedule lambda, int channels, double omega)
    : coupling_(std::move(coupling)), schedule_(lambda), channels_(channels), omega_(omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega", "must be positive");
  const auto& r = std::get<RankOneCoupling>(coupling_);
  if (!(r.kappa > 0.0)) throw ValidationError("kappa", "must be positive");
  if (r.channel_vector.size() != channels)
    throw ValidationError("channel_vector", "length does not match channel count");
  if (std::abs(r.channel_vector.norm() - 1.0) > 1e-12)
    throw ValidationError("channel_vector", "must be a unit vector");
}

ScatterModel ScatterModel::with_omega(double omega) const {
  ScatterModel m = *this;
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega", "must be positive");
  m.omega_ = omega;
  return m;
}

ScatterModel ScatterModel::with_schedule(Schedule schedule) const {
  ScatterModel m = *this;
  m.schedule_ = schedule;
  return m;
}

std::pair<double, double> ScatterModel::coupling_support() const {
  if (is_rank_one()) {
    const double r = rank_one().radius();
    return {-r, r};
  }
  return potential().support();
}

}  // namespace adiascat
