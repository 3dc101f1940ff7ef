#include "adiascat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "adiascat/error.hpp"

namespace adiascat {

Grid::Grid(double x_min, double x_max, int n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
    throw ValidationError("grid", "x_max must exceed x_min");
  if (n < 2 || n % 2 != 0) throw ValidationError("grid.n", "must be even and >= 2");
  dx_ = (x_max - x_min) / n;
}

double Grid::momentum(int k) const noexcept {
  if (k == n_ / 2) return 0.0;
  const int m = k < n_ / 2 ? k : k - n_;
  return 2.0 * std::numbers::pi * m / length();
}

double Grid::max_momentum() const noexcept { return std::numbers::pi / dx_; }

StateVector::StateVector(Grid grid, int channels) : grid_(grid) {
  if (channels < 1) throw ValidationError("channels", "must be positive");
  amp_ = Matrix::Zero(channels, grid.size());
}

StateVector::StateVector(Grid grid, Matrix amplitudes) : grid_(grid), amp_(std::move(amplitudes)) {
  if (amp_.cols() != grid.size() || amp_.rows() < 1)
    throw ValidationError("state", "amplitude shape does not match grid");
}

double StateVector::norm() const { return std::sqrt(amp_.squaredNorm() * grid_.dx()); }

bool StateVector::is_finite() const { return amp_.allFinite(); }

std::pair<double, double> StateVector::support(double threshold) const {
  const Eigen::VectorXd col = amp_.colwise().norm().transpose();
  const double peak = col.maxCoeff();
  if (peak == 0.0) return {grid_.x_min(), grid_.x_min()};
  int lo = 0;
  int hi = grid_.size() - 1;
  while (col(lo) <= threshold * peak) ++lo;
  while (col(hi) <= threshold * peak) --hi;
  return {grid_.x(lo), grid_.x(hi)};
}

StateVector& StateVector::operator+=(const StateVector& other) {
  amp_ += other.amp_;
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  amp_ -= other.amp_;
  return *this;
}

StateVector& StateVector::operator*=(cplx factor) {
  amp_ *= factor;
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator*(cplx factor, StateVector a) { return a *= factor; }

cplx inner(const StateVector& a, const StateVector& b) {
  if (!(a.grid() == b.grid()) || a.channels() != b.channels())
    throw ValidationError("inner", "states live on different spaces");
  const Matrix& x = a.amplitudes();
  const Matrix& y = b.amplitudes();
  cplx sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += std::conj(x.data()[i]) * y.data()[i];
  return sum * a.grid().dx();
}

namespace detail {

void fft_rows(const Matrix& in, Matrix& out, bool inverse) {
  Eigen::FFT<double> fft;
  const Eigen::Index n = in.cols();
  out.resize(in.rows(), n);
  std::vector<cplx> src(n);
  std::vector<cplx> dst(n);
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    for (Eigen::Index i = 0; i < n; ++i) src[i] = in(r, i);
    if (inverse)
      fft.inv(dst, src);
    else
      fft.fwd(dst, src);
    for (Eigen::Index i = 0; i < n; ++i) out(r, i) = dst[i];
  }
}

}  // namespace detail

StateVector apply_h0(const StateVector& state) {
  return apply_in_momentum(state, [&](double k) {
    return Matrix(Matrix::Identity(state.channels(), state.channels()) * k);
  });
}

std::pair<double, long> snap_to_lattice(const Grid& grid, double t) {
  const long m = std::lround(t / grid.dx());
  return {m * grid.dx(), m};
}

StateVector free_evolve(const StateVector& state, double t) {
  const Grid& g = state.grid();
  const auto [snapped, m] = snap_to_lattice(g, t);
  if (std::abs(t - snapped) <= 1e-9 * g.dx()) {
    const int n = g.size();
    const long shift = ((m % n) + n) % n;
    Matrix out(state.channels(), n);
    for (int i = 0; i < n; ++i) out.col((i + shift) % n) = state.amplitudes().col(i);
    return StateVector(g, std::move(out));
  }
  const Matrix phase = Matrix::Identity(state.channels(), state.channels());
  return apply_in_momentum(state, [&](double k) {
    return Matrix(phase * std::exp(cplx(0.0, -k * t)));
  });
}

cplx energy_amplitude(const StateVector& state, int channel, double energy) {
  const Grid& g = state.grid();
  cplx sum = 0.0;
  for (int i = 0; i < g.size(); ++i)
    sum += std::exp(cplx(0.0, -energy * g.x(i))) * state(channel, i);
  return sum * g.dx() / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace adiascat
