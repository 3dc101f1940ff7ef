#include "adiascat/soluble.hpp"

#include <cmath>

#include "adiascat/error.hpp"
#include "adiascat/numerics.hpp"

namespace adiascat {

SolubleModel::SolubleModel(Profile v_, Schedule f_, double omega_)
    : v(std::move(v_)), f(f_), omega(omega_) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega", "must be positive");
}

void SolubleModel::validate(const Grid& grid) const {
  const auto [lo, hi] = v.support();
  if (!v.empty() && !grid.contains(lo, hi))
    throw ClearanceError("potential", "profile does not decay inside the grid window",
                         std::max(std::abs(lo), std::abs(hi)));
}

ScatterModel SolubleModel::as_network() const {
  MatrixPotential pot(1, {{Matrix::Identity(1, 1), v}});
  return ScatterModel(std::move(pot), f, omega);
}

SolubleModel SolubleModel::default_fixture() {
  return SolubleModel(Profile({GaussianBump{1.0, 0.0, 1.0}}), Schedule(Schedule::Kind::tanh, 1.0), 0.1);
}

namespace soluble {

namespace {

// int g(x - u) v(u) du over the grid in u, restricted to the support of v.
template <class G>
RealField convolve(const SolubleModel& model, const Grid& grid, G&& g) {
  model.validate(grid);
  RealField out = RealField::Zero(grid.size());
  if (model.v.empty()) return out;
  const auto [lo, hi] = model.v.support();
  const int i0 = std::max(0, static_cast<int>(std::floor((lo - grid.x_min()) / grid.dx())));
  const int i1 = std::min(grid.size() - 1, static_cast<int>(std::ceil((hi - grid.x_min()) / grid.dx())));
  std::vector<double> vu(i1 - i0 + 1);
  for (int k = i0; k <= i1; ++k) vu[k - i0] = model.v(grid.x(k));
  std::vector<double> samples(vu.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    for (int k = i0; k <= i1; ++k) samples[k - i0] = g(x - grid.x(k)) * vu[k - i0];
    out(i) = numerics::quadrature(std::span<const double>(samples), grid.dx());
  }
  return out;
}

}  // namespace

RealField gauge_phase(const SolubleModel& model, double s, const Grid& grid) {
  return convolve(model, grid, [&](double tp) { return model.f.value(s - model.omega * tp); });
}

cplx frozen_S(const SolubleModel& model, double s) {
  return std::exp(cplx(0.0, -model.f.value(s) * model.v.weight()));
}

RealField dynamical_energy_shift(const SolubleModel& model, double s, const Grid& grid) {
  return convolve(model, grid, [&](double tp) { return model.f.rate(s - model.omega * tp); });
}

double frozen_energy_shift(const SolubleModel& model, double s) {
  return model.f.rate(s) * model.v.weight();
}

ComplexField tau_first_order(const SolubleModel& model, double s, const Grid& grid) {
  const RealField moment = convolve(model, grid, [](double tp) { return tp; });
  return (-model.f.rate(s) * frozen_S(model, s)) * moment.cast<cplx>();
}

StateVector apply_dynamical_S(const SolubleModel& model, double s, const StateVector& state) {
  const RealField phi = gauge_phase(model, s, state.grid());
  StateVector out = state;
  for (int i = 0; i < state.grid().size(); ++i)
    out.amplitudes().col(i) *= std::exp(cplx(0.0, -phi(i)));
  return out;
}

}  // namespace soluble
}  // namespace adiascat
