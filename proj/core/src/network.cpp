#include "adiascat/network.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "adiascat/error.hpp"
#include "adiascat/numerics.hpp"

namespace adiascat {

namespace {

constexpr double kMaxRankOneStep = 0.02;

double window_half(const Grid& g) { return std::min(-g.x_min(), g.x(g.size() - 1)); }

bool is_zero(const StateVector& s) { return s.amplitudes().squaredNorm() == 0.0; }

void require_in_window(const Grid& g, double lo, double hi, const char* field) {
  if (!g.contains(lo, hi)) {
    std::ostringstream msg;
    msg << "packet support [" << lo << ", " << hi << "] leaves the grid window";
    throw ClearanceError(field, msg.str(), std::max(std::abs(lo), std::abs(hi)));
  }
}

// T exp(-i int_{u0}^{u1} f(u) v(base + u) du), clipped to the potential's
// support. The step count depends only on the support length, so the
// discretisation error varies smoothly with `base`.
Matrix transport(const MatrixPotential& pot, const std::function<double(double)>& f, double base,
                 double u0, double u1, double h_target) {
  const int n = pot.channels();
  const auto [a, b] = pot.support();
  const double lo = a - base;
  const double hi = b - base;
  double c0 = 0.0;
  double c1 = 0.0;
  if (u1 >= u0) {
    c0 = std::max(u0, lo);
    c1 = std::min(u1, hi);
    if (c0 >= c1) return Matrix::Identity(n, n);
  } else {
    c0 = std::min(u0, hi);
    c1 = std::max(u1, lo);
    if (c0 <= c1) return Matrix::Identity(n, n);
  }
  const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / h_target)));
  if (n == 1) {
    // two-point Gauss-Legendre, identical to fourth-order Magnus for commuting values
    const double h = (c1 - c0) / steps;
    const double d = std::sqrt(3.0) / 6.0;
    double phase = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double m = c0 + (k + 0.5) * h;
      const double u_a = m - d * h;
      const double u_b = m + d * h;
      phase += 0.5 * h * (f(u_a) * pot.at(base + u_a)(0, 0).real() + f(u_b) * pot.at(base + u_b)(0, 0).real());
    }
    return Matrix::Constant(1, 1, std::exp(cplx(0.0, -phase)));
  }
  const numerics::MatrixPath path = [&](double u) -> Matrix {
    return cplx(0.0, -f(u)) * pot.at(base + u);
  };
  return numerics::ordered_exponential(path, c0, c1, steps, numerics::MagnusOrder::fourth);
}

StateVector propagate_matrix(const ScatterModel& model, const StateVector& state, double t0, double t1,
                             std::optional<double> frozen_at, double* applied) {
  const Grid& g = state.grid();
  const auto [duration, m] = snap_to_lattice(g, t1 - t0);
  if (applied) *applied = duration;
  if (!is_zero(state)) {
    const auto [lo, hi] = state.support();
    require_in_window(g, lo + duration, hi + duration, "propagate");
  }
  const MatrixPotential& pot = model.potential();
  const Schedule& f = model.schedule();
  const double w = model.omega();
  const std::function<double(double)> fu = frozen_at
      ? std::function<double(double)>([v = f.value(*frozen_at)](double) { return v; })
      : std::function<double(double)>([&](double tau) { return f.value(w * tau); });

  const int n = g.size();
  Matrix out = Matrix::Zero(state.channels(), n);
  for (int i = 0; i < n; ++i) {
    const long src = i - m;
    if (src < 0 || src >= n) continue;
    const auto col = state.amplitudes().col(src);
    if (col.squaredNorm() == 0.0) continue;
    // position at time tau is x_src + (tau - t0)
    const double base = g.x(static_cast<int>(src)) - t0;
    out.col(i) = transport(pot, fu, base, t0, t0 + duration, g.dx()) * col;
  }
  return StateVector(g, std::move(out));
}

// Interaction picture: phi(tau) = e^{i H0 (tau - t0)} psi(tau) obeys
// dphi/dtau = -i lambda(tau) chi_a c <chi_a c, phi>, chi_a(x) = chi(x + a).
// The RK4 stages are all multiples of chi_a c, so each step only touches the
// window where chi_a is non-negligible.
StateVector propagate_rank_one(const ScatterModel& model, const StateVector& state, double t0, double t1,
                               std::optional<double> frozen_at, double* applied) {
  const Grid& g = state.grid();
  const double duration = t1 - t0;
  if (applied) *applied = duration;
  if (duration == 0.0) return state;
  const RankOneCoupling& rc = model.rank_one();
  const Schedule& f = model.schedule();
  const double w = model.omega();
  auto lambda = [&](double tau) { return frozen_at ? f.value(*frozen_at) : f.value(w * tau); };

  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(duration) / std::min(g.dx(), kMaxRankOneStep))));
  const double h = duration / steps;
  const double radius = rc.radius();
  const Vector& c = rc.channel_vector;
  const Eigen::RowVectorXcd c_adj = c.adjoint();
  Matrix phi = state.amplitudes();
  const double norm0 = state.norm();

  struct Window {
    int i0 = 0;
    int i1 = -1;
    std::vector<double> chi;
  };
  auto window = [&](double a) {
    Window win;
    win.i0 = std::max(0, static_cast<int>(std::ceil((-a - radius - g.x_min()) / g.dx())));
    win.i1 = std::min(g.size() - 1, static_cast<int>(std::floor((-a + radius - g.x_min()) / g.dx())));
    for (int i = win.i0; i <= win.i1; ++i) win.chi.push_back(rc.chi(g.x(i) + a));
    return win;
  };
  auto project = [&](const Window& win) {
    cplx sum = 0.0;
    for (int i = win.i0; i <= win.i1; ++i) sum += win.chi[i - win.i0] * (c_adj * phi.col(i))(0);
    return sum * g.dx();
  };
  auto gram = [&](const Window& p, const Window& q) {
    const int lo = std::max(p.i0, q.i0);
    const int hi = std::min(p.i1, q.i1);
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) sum += p.chi[i - p.i0] * q.chi[i - q.i0];
    return sum * g.dx();
  };
  auto add = [&](const Window& win, cplx coeff) {
    for (int i = win.i0; i <= win.i1; ++i) phi.col(i) += (coeff * win.chi[i - win.i0]) * c;
  };

  const cplx mi(0.0, -1.0);
  Window w1 = window(0.0);
  for (int k = 0; k < steps; ++k) {
    const double a = k * h;
    const double tau = t0 + a;
    const Window w2 = window(a + 0.5 * h);
    Window w4 = window(a + h);
    const double l1 = lambda(tau);
    const double l2 = lambda(tau + 0.5 * h);
    const double l4 = lambda(tau + h);
    const cplx p1 = project(w1);
    const cplx p2 = project(w2);
    const cplx p4 = project(w4);
    const cplx b1 = mi * l1 * p1;
    const cplx b2 = mi * l2 * (p2 + 0.5 * h * b1 * gram(w2, w1));
    const cplx b3 = mi * l2 * (p2 + 0.5 * h * b2 * gram(w2, w2));
    const cplx b4 = mi * l4 * (p4 + h * b3 * gram(w4, w2));
    add(w1, h / 6.0 * b1);
    add(w2, h / 6.0 * 2.0 * (b2 + b3));
    add(w4, h / 6.0 * b4);
    w1 = std::move(w4);
  }

  StateVector result(g, std::move(phi));
  const double drift = std::abs(result.norm() - norm0);
  if (drift > 1e-6 * std::max(1.0, norm0)) {
    std::ostringstream msg;
    msg << "rank-one propagation lost unitarity (norm drift " << drift << "); use a step below " << 0.5 * std::abs(h);
    throw NumericalError(msg.str());
  }
  if (!is_zero(result)) {
    const auto [lo, hi] = result.support();
    require_in_window(g, lo + duration, hi + duration, "propagate");
  }
  return free_evolve(result, duration);
}

void require_clear_of_coupling(const ScatterModel& model, const StateVector& s, double T, const char* field) {
  if (is_zero(s)) return;
  const auto [lo, hi] = s.support();
  const auto [a, b] = model.coupling_support();
  if (hi >= a && lo <= b) {
    std::ostringstream msg;
    msg << "packet support [" << lo << ", " << hi << "] overlaps the coupling region [" << a << ", " << b
        << "] at the asymptotic time; increase T";
    const double need = T + std::min(hi - a, b - lo);
    throw ClearanceError(field, msg.str(), need);
  }
}

double epoch_time(const ScatterModel& model, double s) { return s / model.omega(); }

std::optional<double> frozen_epoch(Evolution e, double s) {
  return e == Evolution::frozen ? std::optional<double>(s) : std::nullopt;
}

void require_field_clearance(const ScatterModel& model, const StateVector& state, double T, Asymptote which) {
  if (is_zero(state)) return;
  const auto [lo, hi] = state.support();
  const auto [a, b] = model.coupling_support();
  const double need = which == Asymptote::incoming ? hi - a : b - lo;
  if (T < need) {
    std::ostringstream msg;
    msg << "T = " << T << " too short for the packet to clear the coupling; need T >= " << need;
    throw ClearanceError("T", msg.str(), need);
  }
}

}  // namespace

StateVector apply_hamiltonian(const ScatterModel& model, double s, const StateVector& state) {
  StateVector out = apply_h0(state);
  const Grid& g = state.grid();
  const double f = model.schedule().value(s);
  if (model.is_rank_one()) {
    const RankOneCoupling& rc = model.rank_one();
    const Eigen::RowVectorXcd c_adj = rc.channel_vector.adjoint();
    cplx proj = 0.0;
    for (int i = 0; i < g.size(); ++i) proj += rc.chi(g.x(i)) * (c_adj * state.amplitudes().col(i))(0);
    proj *= g.dx();
    for (int i = 0; i < g.size(); ++i) out.amplitudes().col(i) += (f * rc.chi(g.x(i)) * proj) * rc.channel_vector;
  } else {
    const MatrixPotential& pot = model.potential();
    for (int i = 0; i < g.size(); ++i) out.amplitudes().col(i) += f * (pot.at(g.x(i)) * state.amplitudes().col(i));
  }
  return out;
}

StateVector apply_hamiltonian_rate(const ScatterModel& model, double s, const StateVector& state) {
  const Grid& g = state.grid();
  const double rate = model.schedule().rate(s);
  StateVector out(g, state.channels());
  if (model.is_rank_one()) {
    const RankOneCoupling& rc = model.rank_one();
    const Eigen::RowVectorXcd c_adj = rc.channel_vector.adjoint();
    cplx proj = 0.0;
    for (int i = 0; i < g.size(); ++i) proj += rc.chi(g.x(i)) * (c_adj * state.amplitudes().col(i))(0);
    proj *= g.dx();
    for (int i = 0; i < g.size(); ++i) out.amplitudes().col(i) = (rate * rc.chi(g.x(i)) * proj) * rc.channel_vector;
  } else {
    const MatrixPotential& pot = model.potential();
    for (int i = 0; i < g.size(); ++i) out.amplitudes().col(i) = rate * (pot.at(g.x(i)) * state.amplitudes().col(i));
  }
  return out;
}

StateVector propagate(const ScatterModel& model, const StateVector& state, double t0, double t1,
                      std::optional<double> frozen_at, double* applied_duration) {
  if (state.channels() != model.channels())
    throw ValidationError("state", "channel count does not match model");
  if (!state.is_finite()) throw ValidationError("state", "non-finite amplitudes");
  if (model.is_rank_one()) return propagate_rank_one(model, state, t0, t1, frozen_at, applied_duration);
  return propagate_matrix(model, state, t0, t1, frozen_at, applied_duration);
}

double default_scattering_time(const Grid& grid, double eps) {
  const double T = window_half(grid) - coherent_support_radius(eps) - 2.0 * grid.dx();
  if (T <= 0.0)
    throw ClearanceError("grid", "window too small for packets of this width", coherent_support_radius(eps));
  return std::floor(T / grid.dx()) * grid.dx();
}

LocalField characteristic_field(const ScatterModel& model, double s, double u0, double u1, const Grid& grid,
                                Evolution evolution) {
  if (model.is_rank_one()) throw ValidationError("model", "rank-one couplings have no local field");
  const MatrixPotential& pot = model.potential();
  const Schedule& f = model.schedule();
  const double w = evolution == Evolution::frozen ? 0.0 : model.omega();
  const std::function<double(double)> fu = [&](double u) { return f.value(s + w * u); };
  LocalField field(grid, model.channels());
  for (int i = 0; i < grid.size(); ++i) field.at(i) = transport(pot, fu, grid.x(i), u0, u1, grid.dx());
  return field;
}

StateVector wave_operator(const ScatterModel& model, double s, Asymptote which, double T, const StateVector& state,
                          Evolution evolution) {
  if (!(T > 0.0)) throw ValidationError("T", "must be positive");
  if (!model.is_rank_one()) {
    require_field_clearance(model, state, T, which);
    const Grid& g = state.grid();
    if (which == Asymptote::incoming) return characteristic_field(model, s, -T, 0.0, g, evolution).apply(state);
    return characteristic_field(model, s, 0.0, T, g, evolution).apply_adjoint(state);
  }
  const double t = epoch_time(model, s);
  const auto frozen = frozen_epoch(evolution, s);
  const double sign = which == Asymptote::incoming ? -1.0 : 1.0;
  const StateVector start = free_evolve(state, sign * T);
  if (!is_zero(state)) {
    const auto [lo, hi] = state.support();
    require_in_window(state.grid(), lo + sign * T, hi + sign * T, "wave_operator");
  }
  require_clear_of_coupling(model, start, T, "T");
  return propagate(model, start, t + sign * T, t, frozen);
}

StateVector wave_operator_adjoint(const ScatterModel& model, double s, Asymptote which, double T,
                                  const StateVector& state, Evolution evolution) {
  if (!(T > 0.0)) throw ValidationError("T", "must be positive");
  if (!model.is_rank_one()) {
    const Grid& g = state.grid();
    if (which == Asymptote::incoming) {
      require_field_clearance(model, state, T, which);
      return characteristic_field(model, s, -T, 0.0, g, evolution).apply_adjoint(state);
    }
    require_field_clearance(model, state, T, which);
    return characteristic_field(model, s, 0.0, T, g, evolution).apply(state);
  }
  const double t = epoch_time(model, s);
  const auto frozen = frozen_epoch(evolution, s);
  const double sign = which == Asymptote::incoming ? -1.0 : 1.0;
  const StateVector back = propagate(model, state, t, t + sign * T, frozen);
  require_clear_of_coupling(model, back, T, "T");
  if (!is_zero(back)) {
    const auto [lo, hi] = back.support();
    require_in_window(state.grid(), lo - sign * T, hi - sign * T, "wave_operator");
  }
  return free_evolve(back, -sign * T);
}

GridOperator wave_operator_op(const ScatterModel& model, double s, Asymptote which, double T, const Grid& grid,
                              Evolution evolution) {
  if (!model.is_rank_one()) {
    LocalField field = which == Asymptote::incoming ? characteristic_field(model, s, -T, 0.0, grid, evolution)
                                                    : characteristic_field(model, s, 0.0, T, grid, evolution).adjoint();
    GridOperator op = GridOperator::from_field(std::move(field), true);
    auto inner_apply = op.apply;
    auto inner_adj = op.apply_adjoint;
    auto m = std::make_shared<const ScatterModel>(model);
    op.apply = [m, inner_apply, T, which](const StateVector& psi) {
      require_field_clearance(*m, psi, T, which);
      return inner_apply(psi);
    };
    op.apply_adjoint = [m, inner_adj, T, which](const StateVector& psi) {
      require_field_clearance(*m, psi, T, which);
      return inner_adj(psi);
    };
    return op;
  }
  auto m = std::make_shared<const ScatterModel>(model);
  GridOperator op;
  op.unitary = true;
  op.apply = [m, s, which, T, evolution](const StateVector& psi) {
    return wave_operator(*m, s, which, T, psi, evolution);
  };
  op.apply_adjoint = [m, s, which, T, evolution](const StateVector& psi) {
    return wave_operator_adjoint(*m, s, which, T, psi, evolution);
  };
  return op;
}

StateVector dynamical_S(const ScatterModel& model, double s, const StateVector& state, double T) {
  if (!(T > 0.0)) throw ValidationError("T", "must be positive");
  const Grid& g = state.grid();
  T = snap_to_lattice(g, T).first;
  const double t = epoch_time(model, s);
  if (!is_zero(state)) {
    const auto [lo, hi] = state.support();
    require_in_window(g, lo - T, hi - T, "dynamical_S");
  }
  const StateVector in = free_evolve(state, -T);
  require_clear_of_coupling(model, in, T, "T");
  const StateVector across = propagate(model, in, t - T, t + T);
  require_clear_of_coupling(model, across, T, "T");
  return free_evolve(across, -T);
}

namespace {

StateVector dynamical_S_adjoint(const ScatterModel& model, double s, const StateVector& state, double T) {
  const Grid& g = state.grid();
  T = snap_to_lattice(g, T).first;
  const double t = epoch_time(model, s);
  if (!is_zero(state)) {
    const auto [lo, hi] = state.support();
    require_in_window(g, lo + T, hi + T, "dynamical_S");
  }
  const StateVector out = free_evolve(state, T);
  require_clear_of_coupling(model, out, T, "T");
  const StateVector back = propagate(model, out, t + T, t - T);
  require_clear_of_coupling(model, back, T, "T");
  return free_evolve(back, T);
}

}  // namespace

GridOperator dynamical_S_op(const ScatterModel& model, double s, double T, const Grid& grid) {
  if (!(T > 0.0)) throw ValidationError("T", "must be positive");
  auto m = std::make_shared<const ScatterModel>(model);
  if (!model.is_rank_one()) {
    GridOperator op = GridOperator::from_field(characteristic_field(model, s, -T, T, grid, Evolution::dynamical), true);
    auto fwd = op.apply;
    auto adj = op.apply_adjoint;
    op.apply = [m, fwd, T](const StateVector& psi) {
      require_field_clearance(*m, psi, T, Asymptote::incoming);
      require_field_clearance(*m, psi, T, Asymptote::outgoing);
      return fwd(psi);
    };
    op.apply_adjoint = [m, adj, T](const StateVector& psi) {
      require_field_clearance(*m, psi, T, Asymptote::incoming);
      require_field_clearance(*m, psi, T, Asymptote::outgoing);
      return adj(psi);
    };
    return op;
  }
  GridOperator op;
  op.unitary = true;
  op.apply = [m, s, T](const StateVector& psi) { return dynamical_S(*m, s, psi, T); };
  op.apply_adjoint = [m, s, T](const StateVector& psi) { return dynamical_S_adjoint(*m, s, psi, T); };
  return op;
}

GridOperator frozen_S_op(const ScatterModel& model, double s, const Grid& grid) {
  if (!model.is_rank_one()) {
    const Matrix S = on_shell_S(model, s, 0.0).S;
    LocalField field(grid, model.channels());
    for (int i = 0; i < grid.size(); ++i) field.at(i) = S;
    return GridOperator::from_field(std::move(field), true);
  }
  // energy-diagonal multiplier on the FFT momenta
  auto table = std::make_shared<std::vector<Matrix>>(grid.size());
  for (int k = 0; k < grid.size(); ++k) (*table)[k] = on_shell_S(model, s, grid.momentum(k)).S;
  auto multiplier = [table, grid](bool adjoint) {
    return [table, grid, adjoint](const StateVector& psi) {
      Matrix spectrum;
      detail::fft_rows(psi.amplitudes(), spectrum, false);
      for (int k = 0; k < grid.size(); ++k) {
        const Matrix& sk = (*table)[k];
        spectrum.col(k) = adjoint ? Vector(sk.adjoint() * spectrum.col(k)) : Vector(sk * spectrum.col(k));
      }
      Matrix out;
      detail::fft_rows(spectrum, out, true);
      return StateVector(grid, std::move(out));
    };
  };
  GridOperator op;
  op.unitary = true;
  op.apply = multiplier(false);
  op.apply_adjoint = multiplier(true);
  return op;
}

StateVector dynamical_S_relative(const ScatterModel& model, double s, const StateVector& state, double T) {
  if (!(T > 0.0)) throw ValidationError("T", "must be positive");
  const Grid& g = state.grid();
  T = snap_to_lattice(g, T).first;
  const double t = epoch_time(model, s);
  const StateVector in = propagate(model, state, 0.0, -T, s);
  const StateVector across = propagate(model, in, t - T, t + T);
  return propagate(model, across, 0.0, -T, s);
}

double OnShellMatrix::unitarity_defect() const {
  return (S.adjoint() * S - Matrix::Identity(S.rows(), S.cols())).norm();
}

OnShellMatrix on_shell_S(const ScatterModel& model, double s, double E) {
  OnShellMatrix out;
  out.s = s;
  out.E = E;
  const double f = model.schedule().value(s);
  if (model.is_rank_one()) {
    const RankOneCoupling& rc = model.rank_one();
    const int n = model.channels();
    out.S = Matrix::Identity(n, n);
    if (f != 0.0) {
      const cplx denom = rank_one::denominator(rc, f, E);
      const cplx amplitude = cplx(0.0, -2.0 * std::numbers::pi) * rc.spectral_density(E) * f / denom;
      out.S += amplitude * (rc.channel_vector * rc.channel_vector.adjoint());
    }
    return out;
  }
  const MatrixPotential& pot = model.potential();
  const auto [a, b] = pot.support();
  const double h = 1e-3;
  out.S = transport(pot, [f](double) { return f; }, 0.0, a, b, h);
  return out;
}

namespace {

HermitianOnShell hermitize(double s, double E, const Matrix& raw) {
  HermitianOnShell out;
  out.s = s;
  out.E = E;
  out.M = 0.5 * (raw + raw.adjoint());
  out.anti_hermitian_residual = (0.5 * (raw - raw.adjoint())).norm();
  if (out.anti_hermitian_residual > 1e-6) {
    std::ostringstream msg;
    msg << "anti-Hermitian part " << out.anti_hermitian_residual << " exceeds 1e-6; derivative step too coarse";
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace

HermitianOnShell wigner_delay(const ScatterModel& model, double s, double E, double h) {
  const Matrix dS = numerics::central_derivative([&](double e) { return on_shell_S(model, s, e).S; }, E, h);
  const Matrix S = on_shell_S(model, s, E).S;
  return hermitize(s, E, cplx(0.0, -1.0) * dS * S.adjoint());
}

HermitianOnShell frozen_energy_shift_onshell(const ScatterModel& model, double s, double E, double h) {
  const Matrix dS = numerics::central_derivative([&](double q) { return on_shell_S(model, q, E).S; }, s, h);
  const Matrix S = on_shell_S(model, s, E).S;
  return hermitize(s, E, cplx(0.0, 1.0) * dS * S.adjoint());
}

double intertwine_residual(const ScatterModel& model, double s, const StateVector& state, double T,
                           Asymptote which) {
  const double norm = state.norm();
  if (norm == 0.0) return 0.0;
  const StateVector omega_psi = wave_operator(model, s, which, T, state, Evolution::frozen);
  const StateVector lhs = apply_hamiltonian(model, s, omega_psi);
  const StateVector rhs = wave_operator(model, s, which, T, apply_h0(state), Evolution::frozen);
  return (lhs - rhs).norm() / norm;
}

double omega_dot_residual(const ScatterModel& model, double s, const StateVector& state, double T, double h,
                          Asymptote which) {
  const double norm = state.norm();
  if (norm == 0.0) return 0.0;
  const Grid& g = state.grid();
  const Matrix dOmega = numerics::central_derivative(
      [&](double q) { return wave_operator(model, q, which, T, state).amplitudes(); }, s, h);
  const StateVector omega_psi = wave_operator(model, s, which, T, state);
  const StateVector commutator =
      apply_hamiltonian(model, s, omega_psi) - wave_operator(model, s, which, T, apply_h0(state));
  const StateVector lhs(g, Matrix(cplx(0.0, model.omega()) * dOmega));
  return (lhs - commutator).norm() / norm;
}

}  // namespace adiascat
