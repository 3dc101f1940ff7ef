#include "adiascat/coherent.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "adiascat/error.hpp"

namespace adiascat {

namespace {

constexpr double kPi = std::numbers::pi;

void require_inside(const Grid& grid, double lo, double hi, const char* field) {
  if (!grid.contains(lo, hi)) {
    std::ostringstream msg;
    msg << "support [" << lo << ", " << hi << "] leaves window [" << grid.x_min() << ", "
        << grid.x(grid.size() - 1) << "]";
    const double need = std::max(std::abs(lo), std::abs(hi));
    throw ClearanceError(field, msg.str(), need);
  }
}

}  // namespace

CoherentLabel::CoherentLabel(double t_, double e_, double eps_) : t(t_), e(e_), eps(eps_) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("eps", "must be positive");
  if (!std::isfinite(t) || !std::isfinite(e)) throw ValidationError("label", "must be finite");
}

double coherent_support_radius(double eps) { return 8.0 / eps; }

cplx coherent_energy_amplitude(const CoherentLabel& l, double energy) {
  const double d = energy - l.e;
  const double g = std::pow(kPi * l.eps * l.eps, -0.25) * std::exp(-0.5 * d * d / (l.eps * l.eps));
  return std::exp(cplx(0.0, -0.5 * l.t * l.e + l.t * energy)) * g;
}

cplx coherent_position_amplitude(const CoherentLabel& l, double x) {
  const double y = x + l.t;
  const double env = std::pow(l.eps * l.eps / kPi, 0.25) * std::exp(-0.5 * l.eps * l.eps * y * y);
  return std::exp(cplx(0.0, 0.5 * l.t * l.e + l.e * x)) * env;
}

StateVector coherent_state(const CoherentLabel& label, int channel, int channels, const Grid& grid) {
  if (channel < 0 || channel >= channels) throw ValidationError("channel", "index out of range");
  const double r = coherent_support_radius(label.eps);
  require_inside(grid, -label.t - r, -label.t + r, "coherent_state");
  if (std::abs(label.e) + 8.0 * label.eps > 0.5 * grid.max_momentum())
    throw ValidationError("coherent_state", "energy band exceeds grid resolution");
  StateVector psi(grid, channels);
  for (int i = 0; i < grid.size(); ++i) psi(channel, i) = coherent_position_amplitude(label, grid.x(i));
  return psi;
}

cplx overlap(const CoherentLabel& a, const CoherentLabel& b) {
  if (a.eps != b.eps) throw ValidationError("overlap", "labels must share the same eps");
  const double eps = a.eps;
  const double de = a.e - b.e;
  const double dt = a.t - b.t;
  const double mag = std::exp(-de * de / (4.0 * eps * eps) - eps * eps * dt * dt / 4.0);
  return mag * std::exp(cplx(0.0, -0.5 * (a.e * b.t - b.e * a.t)));
}

StateVector free_shift(const StateVector& state, double t_shift) {
  const auto [lo, hi] = state.support();
  if (state.amplitudes().squaredNorm() > 0.0)
    require_inside(state.grid(), lo + t_shift, hi + t_shift, "free_shift");
  return free_evolve(state, t_shift);
}

Spread measure_spread(const StateVector& state) {
  const Grid& g = state.grid();
  Spread sp;
  const double n2 = state.norm() * state.norm();
  if (n2 == 0.0) return sp;
  double mx = 0.0;
  double mx2 = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double w = state.amplitudes().col(i).squaredNorm() * g.dx() / n2;
    mx += w * g.x(i);
    mx2 += w * g.x(i) * g.x(i);
  }
  sp.mean_x = mx;
  sp.sigma_x = std::sqrt(std::max(0.0, mx2 - mx * mx));
  const StateVector h = apply_h0(state);
  const StateVector h2 = apply_h0(h);
  sp.mean_e = inner(state, h).real() / n2;
  sp.sigma_e = std::sqrt(std::max(0.0, inner(state, h2).real() / n2 - sp.mean_e * sp.mean_e));
  return sp;
}

double identity_resolution_residual(const Grid& grid, double eps, const StateVector& probe,
                                    double t_range, double e_range, int n_t, int n_e) {
  if (!(eps > 0.0)) throw ValidationError("eps", "must be positive");
  if (n_t < 2 || n_e < 2) throw ValidationError("box", "need at least 2 nodes per axis");
  const double norm = probe.norm();
  if (norm == 0.0) return 0.0;

  const Spread sp = measure_spread(probe);
  const double need_t = std::abs(sp.mean_x) + 4.0 * sp.sigma_x + 4.0 / eps;
  const double need_e = std::abs(sp.mean_e) + 4.0 * sp.sigma_e + 4.0 * eps;
  if (t_range < need_t) {
    std::ostringstream msg;
    msg << "time range " << t_range << " too small, need >= " << need_t;
    throw ClearanceError("t_range", msg.str(), need_t);
  }
  if (e_range < need_e) {
    std::ostringstream msg;
    msg << "energy range " << e_range << " too small, need >= " << need_e;
    throw ClearanceError("e_range", msg.str(), need_e);
  }

  const double dt = 2.0 * t_range / (n_t - 1);
  const double de = 2.0 * e_range / (n_e - 1);
  const int nx = grid.size();
  const double radius = coherent_support_radius(eps);
  const double amp = std::pow(eps * eps / kPi, 0.25);
  Matrix rebuilt = Matrix::Zero(probe.channels(), nx);
  std::vector<cplx> gauss(nx);
  std::vector<cplx> wave(nx);
  std::vector<cplx> step(nx);
  for (int a = 0; a < n_t; ++a) {
    const double wt = (a == 0 || a == n_t - 1) ? 0.5 : 1.0;
    const double t = -t_range + a * dt;
    // packet window; outside it the basis is below 1e-14
    const int i0 = std::max(0, static_cast<int>(std::floor((-t - radius - grid.x_min()) / grid.dx())));
    const int i1 = std::min(nx - 1, static_cast<int>(std::ceil((-t + radius - grid.x_min()) / grid.dx())));
    if (i0 > i1) continue;
    for (int i = i0; i <= i1; ++i) {
      const double y = grid.x(i) + t;
      gauss[i] = amp * std::exp(-0.5 * eps * eps * y * y);
      wave[i] = std::exp(cplx(0.0, -e_range * grid.x(i)));
      step[i] = std::exp(cplx(0.0, de * grid.x(i)));
    }
    for (int b = 0; b < n_e; ++b) {
      const double we = (b == 0 || b == n_e - 1) ? 0.5 : 1.0;
      const double e = -e_range + b * de;
      const cplx global = std::exp(cplx(0.0, 0.5 * t * e));
      const double w = wt * we * dt * de / (2.0 * kPi);
      for (int c = 0; c < probe.channels(); ++c) {
        cplx proj = 0.0;
        for (int i = i0; i <= i1; ++i) proj += std::conj(global * wave[i] * gauss[i]) * probe(c, i);
        proj *= grid.dx() * w;
        for (int i = i0; i <= i1; ++i) rebuilt(c, i) += proj * global * wave[i] * gauss[i];
      }
      if (b + 1 < n_e) {
        if ((b + 1) % 16 == 0) {
          const double e_next = e + de;
          for (int i = i0; i <= i1; ++i) wave[i] = std::exp(cplx(0.0, e_next * grid.x(i)));
        } else {
          for (int i = i0; i <= i1; ++i) wave[i] *= step[i];
        }
      }
    }
  }
  const StateVector diff = probe - StateVector(grid, std::move(rebuilt));
  return diff.norm() / norm;
}

}  // namespace adiascat
