#include "adiascat/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "adiascat/error.hpp"

namespace adiascat {

namespace {

constexpr double kOnShellStep = 1e-3;
constexpr double kTauNodeSpacing = 0.1;
constexpr double kBornNodeSpacing = 0.05;

void require_channel(const ScatterModel& model, int j, const char* field) {
  if (j < 0 || j >= model.channels()) throw ValidationError(field, "channel index out of range");
}

void require_omega(const ScatterModel& model) {
  if (!(model.omega() > 0.0)) throw ValidationError("omega", "must be positive");
}

// Lattice multiple of dx closest to `target` (at least one cell).
double lattice_step(const Grid& grid, double target) {
  const double m = std::max(1.0, std::round(target / grid.dx()));
  return m * grid.dx();
}

StateVector coupling_times(const ScatterModel& model, double factor, const StateVector& state) {
  // factor * V psi, with V the s-independent coupling shape
  const Grid& g = state.grid();
  StateVector out(g, state.channels());
  if (factor == 0.0) return out;
  if (model.is_rank_one()) {
    const RankOneCoupling& rc = model.rank_one();
    const Eigen::RowVectorXcd c_adj = rc.channel_vector.adjoint();
    cplx proj = 0.0;
    for (int i = 0; i < g.size(); ++i) proj += rc.chi(g.x(i)) * (c_adj * state.amplitudes().col(i))(0);
    proj *= g.dx();
    for (int i = 0; i < g.size(); ++i) out.amplitudes().col(i) = (factor * rc.chi(g.x(i)) * proj) * rc.channel_vector;
  } else {
    const MatrixPotential& pot = model.potential();
    for (int i = 0; i < g.size(); ++i) out.amplitudes().col(i) = factor * (pot.at(g.x(i)) * state.amplitudes().col(i));
  }
  return out;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

ErrorReport make_report(cplx exact, cplx approx, ErrorParameters params) {
  ErrorReport r;
  r.value_exact = exact;
  r.value_approx = approx;
  r.abs_error = std::abs(exact - approx);
  r.params = params;
  return r;
}

EnergyFunction EnergyFunction::constant(double value) {
  return {"constant", [value](double) { return value; }};
}

EnergyFunction EnergyFunction::fermi(double mu, double width) {
  if (!(width > 0.0)) throw ValidationError("rho.width", "must be positive");
  return {"fermi", [mu, width](double E) { return 0.5 * (1.0 - std::tanh(0.5 * (E - mu) / width)); }};
}

EnergyFunction EnergyFunction::gaussian(double center, double width) {
  if (!(width > 0.0)) throw ValidationError("rho.width", "must be positive");
  return {"gaussian", [center, width](double E) {
            const double z = (E - center) / width;
            return std::exp(-z * z);
          }};
}

EnergyFunction EnergyFunction::polynomial(std::vector<double> coefficients) {
  return {"polynomial", [c = std::move(coefficients)](double E) {
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * E + *it;
            return acc;
          }};
}

FrozenEvolution::FrozenEvolution(const ScatterModel& model, double s, const Grid& grid) : model_(model), s_(s) {
  if (!model.is_rank_one()) {
    const auto [a, b] = model.coupling_support();
    const double reach = grid.length() + (b - a) + 1.0;
    intertwiner_ = characteristic_field(model, s, -reach, 0.0, grid, Evolution::frozen);
  }
}

StateVector FrozenEvolution::operator()(const StateVector& state, double tau) const {
  if (intertwiner_) return intertwiner_->apply(free_shift(intertwiner_->apply_adjoint(state), tau));
  return propagate(model_, state, 0.0, tau, s_);
}

cplx coherent_element(const GridOperator& op, const ChannelLabel& bra, const ChannelLabel& ket, int channels,
                      const Grid& grid) {
  const StateVector b = coherent_state(bra.label, bra.channel, channels, grid);
  const StateVector k = coherent_state(ket.label, ket.channel, channels, grid);
  return inner(b, op(k));
}

cplx smeared_on_shell(const ScatterModel& model, double s, double e, double eps, int j, int jp, double dt) {
  require_channel(model, j, "j");
  require_channel(model, jp, "jp");
  if (!(eps > 0.0)) throw ValidationError("eps", "must be positive");
  if (model.is_rank_one()) {
    const double lambda = model.schedule().value(s);
    if (rank_one::has_pole(model.rank_one(), lambda, e - 6.0 * eps, e + 6.0 * eps))
      throw ValidationError("e", "rank-one pole within 6 eps of the centre energy");
  }
  const double norm = 1.0 / (std::sqrt(std::numbers::pi) * eps);
  const cplx shift = std::exp(cplx(0.0, -0.5 * dt * e));
  if (!model.is_rank_one()) {
    // energy-independent S: only the Gaussian and the dt phase remain
    const cplx s_jj = on_shell_S(model, s, e).S(j, jp);
    return s_jj * shift * std::exp(-0.25 * eps * eps * dt * dt) * std::exp(cplx(0.0, dt * e));
  }
  auto integrand = [&](double E) -> cplx {
    const double z = (E - e) / eps;
    return norm * std::exp(-z * z) * std::exp(cplx(0.0, dt * E)) * on_shell_S(model, s, E).S(j, jp);
  };
  using boost::math::quadrature::gauss_kronrod;
  const cplx value = gauss_kronrod<double, 61>::integrate(integrand, e - 10.0 * eps, e + 10.0 * eps, 12, 1e-13);
  return shift * value;
}

ErrorReport onshell_vs_frozen(const ScatterModel& model, double s, double e, double eps, int j, int jp) {
  const cplx exact = smeared_on_shell(model, s, e, eps, j, jp);
  const cplx approx = on_shell_S(model, s, e).S(j, jp);
  ErrorReport r = make_report(exact, approx, {model.omega(), eps, s, e, j, jp});
  const HermitianOnShell tw = wigner_delay(model, s, e, kOnShellStep);
  const double h = 1e-2;
  const Matrix dtw = (wigner_delay(model, s, e + h, kOnShellStep).M - wigner_delay(model, s, e - h, kOnShellStep).M) /
                     (2.0 * h);
  const double nt = operator_norm(tw.M);
  r.predicted_bound = eps * eps * (nt * nt + operator_norm(dtw));
  return r;
}

cplx remainder_exact(const ScatterModel& model, double s, double e, double eps, int j, int jp, double T,
                     const Grid& grid) {
  require_channel(model, j, "j");
  require_channel(model, jp, "jp");
  require_omega(model);
  const int n = model.channels();
  const CoherentLabel origin(0.0, e, eps);
  const StateVector bra = coherent_state(origin, j, n, grid);
  const StateVector ket = coherent_state(origin, jp, n, grid);
  const StateVector dyn = dynamical_S(model, s, ket, T);
  const StateVector frz = frozen_S_op(model, s, grid)(ket);
  return inner(bra, dyn) - inner(bra, frz);
}

cplx adiabatic_tau(const ScatterModel& model, double s, double e, double eps, int j, int jp, double T,
                   const Grid& grid) {
  require_channel(model, j, "j");
  require_channel(model, jp, "jp");
  const int n = model.channels();
  if (model.schedule().rate(s) == 0.0) return 0.0;
  const CoherentLabel origin(0.0, e, eps);
  const StateVector plus =
      wave_operator(model, s, Asymptote::outgoing, T, coherent_state(origin, j, n, grid), Evolution::frozen);
  const StateVector minus =
      wave_operator(model, s, Asymptote::incoming, T, coherent_state(origin, jp, n, grid), Evolution::frozen);

  const FrozenEvolution evolve(model, s, grid);
  const double h = lattice_step(grid, std::min(kTauNodeSpacing, 0.25 / eps));
  const int K = static_cast<int>(std::ceil(coherent_support_radius(eps) / h));

  auto integrand = [&](const StateVector& p, const StateVector& m) {
    return inner(p, apply_hamiltonian_rate(model, s, m));
  };
  const cplx at_zero = integrand(plus, minus);
  double peak = std::abs(at_zero);
  cplx sum = 0.0;  // t' = 0 contributes nothing (factor t')
  double tail = 0.0;
  for (const double dir : {1.0, -1.0}) {
    StateVector p = plus;
    StateVector m = minus;
    for (int k = 1; k <= K; ++k) {
      p = evolve(p, dir * h);
      m = evolve(m, dir * h);
      const cplx value = integrand(p, m);
      const double tp = dir * k * h;
      peak = std::max(peak, std::abs(value));
      const double w = k == K ? 0.5 * h : h;
      sum += w * tp * value;
      if (k == K) tail = std::max(tail, std::abs(value));
    }
  }
  if (tail > 1e-8 * peak + 1e-300) {
    std::ostringstream msg;
    msg << "tau integrand does not decay: |I(8/eps)| = " << std::abs(tail) << " vs peak " << peak;
    throw NumericalError(msg.str());
  }
  return sum;
}

GridOperator born_correction(const ScatterModel& model, double s, double T, const Grid& grid, bool linearized) {
  if (!(T > 0.0)) throw ValidationError("T", "must be positive");
  auto m = std::make_shared<const ScatterModel>(model);
  auto evolve = std::make_shared<const FrozenEvolution>(model, s, grid);
  const double h = lattice_step(grid, kBornNodeSpacing);
  const int K = static_cast<int>(std::floor(T / h + 1e-9));
  if (K < 1) throw ValidationError("T", "shorter than one quadrature node");

  auto delta_factor = [m, s, linearized](double tp) {
    const Schedule& f = m->schedule();
    if (linearized) return m->omega() * tp * f.rate(s);
    return f.value(s + m->omega() * tp) - f.value(s);
  };

  // -i sum_k w_k e^{iH_s t_k} dH_k e^{-iH_s t_k} psi, each half-line summed by
  // Horner from its far end towards t' = 0 so that intermediates stay within
  // reach T of the coupling.
  auto action = [m, evolve, h, K, delta_factor](const StateVector& psi, bool adjoint) {
    StateVector total(psi.grid(), psi.channels());
    for (const double dir : {1.0, -1.0}) {
      std::vector<StateVector> forward;
      forward.reserve(K + 1);
      forward.push_back(psi);
      for (int k = 1; k <= K; ++k) forward.push_back((*evolve)(forward.back(), dir * h));
      StateVector acc(psi.grid(), psi.channels());
      for (int k = K; k >= 0; --k) {
        if (k < K) acc = (*evolve)(acc, -dir * h);
        double w = (k == K) ? 0.5 * h : h;
        if (k == 0) w = 0.5 * h;
        acc += coupling_times(*m, w * delta_factor(dir * k * h), forward[k]);
      }
      total += acc;
    }
    return (adjoint ? cplx(0.0, 1.0) : cplx(0.0, -1.0)) * total;
  };
  GridOperator op;
  op.apply = [action](const StateVector& psi) { return action(psi, false); };
  op.apply_adjoint = [action](const StateVector& psi) { return action(psi, true); };
  return op;
}

ErrorReport combined_report(const ScatterModel& model, double s, double e, double eps, int j, int jp, double T,
                            const Grid& grid) {
  require_channel(model, j, "j");
  require_channel(model, jp, "jp");
  require_omega(model);
  const int n = model.channels();
  const CoherentLabel origin(0.0, e, eps);
  const StateVector bra = coherent_state(origin, j, n, grid);
  const StateVector ket = coherent_state(origin, jp, n, grid);
  const cplx exact = inner(bra, dynamical_S(model, s, ket, T));
  const cplx approx = on_shell_S(model, s, e).S(j, jp);
  ErrorReport r = make_report(exact, approx, {model.omega(), eps, s, e, j, jp});

  const HermitianOnShell tw = wigner_delay(model, s, e, kOnShellStep);
  const double h = 1e-2;
  const Matrix dtw = (wigner_delay(model, s, e + h, kOnShellStep).M - wigner_delay(model, s, e - h, kOnShellStep).M) /
                     (2.0 * h);
  const double nt = operator_norm(tw.M);
  const cplx tau = adiabatic_tau(model, s, e, eps, j, jp, T, grid);
  r.predicted_bound = eps * eps * (nt * nt + operator_norm(dtw)) + model.omega() * std::abs(tau);
  return r;
}

GridOperator energy_shift_operator(const ScatterModel& model, double s, double T, const Grid& grid) {
  require_omega(model);
  const GridOperator S = dynamical_S_op(model, s, T, grid);
  const double w = model.omega();
  auto action = [S, w](const StateVector& psi) {
    StateVector out = apply_h0(psi) - S(apply_h0(S.apply_adjoint(psi)));
    out *= cplx(1.0 / w, 0.0);
    return out;
  };
  GridOperator op;
  op.apply = action;
  op.apply_adjoint = action;
  return op;
}

double outgoing_state_check(const ScatterModel& model, double s, const EnergyFunction& rho, double T,
                            const Grid& grid) {
  require_omega(model);
  const int n = grid.size();
  const int c = model.channels();
  const int N = n * c;
  if (N > 2048) throw ValidationError("grid", "dense check limited to 2048 unknowns; use a smaller grid");
  const GridOperator S = dynamical_S_op(model, s, T, grid);
  if (!S.local) throw ValidationError("model", "outgoing_state_check needs a local dynamical S (matrix potential)");

  // dense H0 on one channel from the spectral derivative of unit vectors
  Matrix d1(n, n);
  for (int i = 0; i < n; ++i) {
    StateVector unit(grid, 1);
    unit.amplitudes()(0, i) = 1.0;
    d1.col(i) = apply_h0(unit).amplitudes().row(0).transpose();
  }
  d1 = 0.5 * (d1 + d1.adjoint()).eval();
  Matrix h0 = Matrix::Zero(N, N);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < c; ++a) h0(i * c + a, k * c + a) = d1(i, k);
  // S_d X S_d^dagger with S_d block diagonal
  auto conjugate = [&](const Matrix& x) {
    Matrix y(N, N);
    for (int i = 0; i < n; ++i) y.middleRows(i * c, c) = S.local->at(i) * x.middleRows(i * c, c);
    for (int k = 0; k < n; ++k) y.middleCols(k * c, c) = y.middleCols(k * c, c) * S.local->at(k).adjoint();
    return y;
  };
  const Matrix energy_shift = (h0 - conjugate(h0)) / model.omega();
  Matrix arg = h0 - model.omega() * energy_shift;
  const double scale = std::max(1.0, arg.cwiseAbs().maxCoeff());
  if ((arg - arg.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw ValidationError("model", "H0 - omega E_d is not Hermitian on the grid");
  arg = 0.5 * (arg + arg.adjoint()).eval();

  auto apply_rho = [&rho](const Matrix& herm) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    Eigen::VectorXd values = es.eigenvalues();
    for (Eigen::Index k = 0; k < values.size(); ++k) values(k) = rho(values(k));
    return Matrix(es.eigenvectors() * values.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
  };
  const Matrix lhs = conjugate(apply_rho(h0));
  const Matrix rhs = apply_rho(arg);
  Matrix diff = lhs - rhs;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ErrorReport thawed_energy_shift_check(const ScatterModel& model, double s, double e, double eps, int j, int jp,
                                      double T, const Grid& grid) {
  require_channel(model, j, "j");
  require_channel(model, jp, "jp");
  const int n = model.channels();
  const CoherentLabel origin(0.0, e, eps);
  const GridOperator E = energy_shift_operator(model, s, T, grid);
  const cplx exact = coherent_element(E, {origin, j}, {origin, jp}, n, grid);
  const cplx approx = frozen_energy_shift_onshell(model, s, e, kOnShellStep).M(j, jp);
  return make_report(exact, approx, {model.omega(), eps, s, e, j, jp});
}

}  // namespace adiascat
