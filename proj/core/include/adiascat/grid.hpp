#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace adiascat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Uniform periodic discretisation of the line: x_i = x_min + i*dx, i < n.
class Grid {
 public:
  Grid(double x_min, double x_max, int n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  int size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }
  double x(int i) const noexcept { return x_min_ + i * dx_; }

  /// Angular wavenumber of FFT bin k. The Nyquist bin is mapped to 0 so the
  /// discrete -i d/dx stays Hermitian.
  double momentum(int k) const noexcept;
  double max_momentum() const noexcept;

  /// True when [lo, hi] lies inside the sampled window.
  bool contains(double lo, double hi) const noexcept {
    return lo >= x_min_ && hi <= x(n_ - 1);
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
  }

 private:
  double x_min_;
  double x_max_;
  int n_;
  double dx_;
};

/// Multichannel wave function psi(x, j). Column i holds the channel vector at x_i.
class StateVector {
 public:
  StateVector(Grid grid, int channels);
  StateVector(Grid grid, Matrix amplitudes);

  const Grid& grid() const noexcept { return grid_; }
  int channels() const noexcept { return static_cast<int>(amp_.rows()); }
  const Matrix& amplitudes() const noexcept { return amp_; }
  Matrix& amplitudes() noexcept { return amp_; }

  cplx& operator()(int channel, int i) { return amp_(channel, i); }
  cplx operator()(int channel, int i) const { return amp_(channel, i); }

  double norm() const;
  bool is_finite() const;

  /// Interval outside of which every amplitude is below `threshold` times the
  /// largest one. Returns (x_min, x_min) for the zero vector.
  std::pair<double, double> support(double threshold = 1e-12) const;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(cplx factor);

 private:
  Grid grid_;
  Matrix amp_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(cplx factor, StateVector a);

/// <a|b> = sum_j int conj(a) b dx, conjugate-linear in the first argument.
cplx inner(const StateVector& a, const StateVector& b);

/// H0 = -i d/dx applied spectrally in every channel.
StateVector apply_h0(const StateVector& state);

/// Free chiral evolution e^{-i H0 t}: translation to the right by t. Exact
/// index rotation when t is a lattice multiple, spectral phase otherwise.
/// Periodic wrap-around is not checked here; callers own clearance.
StateVector free_evolve(const StateVector& state, double t);

/// Multiplies every momentum component by the channel matrix `m(k)`.
template <class F>
StateVector apply_in_momentum(const StateVector& state, F&& m);

/// (E|psi_j> with (x|E) = e^{iEx}/sqrt(2 pi), by grid quadrature.
cplx energy_amplitude(const StateVector& state, int channel, double energy);

/// Nearest lattice multiple of dx; returns the multiple count too.
std::pair<double, long> snap_to_lattice(const Grid& grid, double t);

namespace detail {
void fft_rows(const Matrix& in, Matrix& out, bool inverse);
}

template <class F>
StateVector apply_in_momentum(const StateVector& state, F&& m) {
  const Grid& g = state.grid();
  Matrix spectrum;
  detail::fft_rows(state.amplitudes(), spectrum, false);
  for (int k = 0; k < g.size(); ++k) {
    const Matrix mk = m(g.momentum(k));
    spectrum.col(k) = mk * spectrum.col(k);
  }
  Matrix out;
  detail::fft_rows(spectrum, out, true);
  return StateVector(g, std::move(out));
}

}  // namespace adiascat
