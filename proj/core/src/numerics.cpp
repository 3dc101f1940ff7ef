#include "adiascat/numerics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace adiascat::numerics {

namespace {

template <class T>
T trapezoid(std::span<const T> samples, double dx) {
  if (samples.empty()) return T{};
  T sum{};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(std::abs(samples[i])))
      throw ValidationError("samples", "non-finite value at index " + std::to_string(i));
    sum += samples[i];
  }
  sum -= 0.5 * (samples.front() + samples.back());
  return sum * dx;
}

void require_antihermitian(const Matrix& a) {
  const double scale = std::max(1.0, a.norm());
  if ((a + a.adjoint()).norm() > 1e-12 * scale)
    throw ValidationError("A", "path value is not anti-Hermitian");
}

}  // namespace

cplx quadrature(std::span<const cplx> samples, double dx) { return trapezoid(samples, dx); }
double quadrature(std::span<const double> samples, double dx) { return trapezoid(samples, dx); }

cplx quadrature(const Grid& grid, std::span<const cplx> samples) {
  if (static_cast<int>(samples.size()) != grid.size())
    throw ValidationError("samples", "size does not match grid");
  return trapezoid(samples, grid.dx());
}

Matrix expm_antihermitian(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return Matrix::Constant(1, 1, std::exp(cplx(0.0, a(0, 0).imag())));
  if (n == 2) {
    // a = -i (c0 + c . sigma) with real c
    const double c0 = -0.5 * (a(0, 0) + a(1, 1)).imag();
    const double cz = -0.5 * (a(0, 0) - a(1, 1)).imag();
    const cplx off = cplx(0.0, 1.0) * a(0, 1);  // c_x - i c_y
    const double cx = off.real();
    const double cy = -off.imag();
    const double r = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double c = std::cos(r);
    const double s = r > 0.0 ? std::sin(r) / r : 1.0;
    const cplx phase = std::exp(cplx(0.0, -c0));
    const cplx mi(0.0, -1.0);
    Matrix u(2, 2);
    u(0, 0) = phase * (c + mi * s * cz);
    u(1, 1) = phase * (c - mi * s * cz);
    u(0, 1) = phase * mi * s * cplx(cx, -cy);
    u(1, 0) = phase * mi * s * cplx(cx, cy);
    return u;
  }
  // a = -i h with h Hermitian
  const Matrix h = cplx(0.0, 1.0) * a;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (h + h.adjoint()));
  const Eigen::VectorXcd phases =
      (cplx(0.0, -1.0) * eig.eigenvalues().cast<cplx>()).array().exp().matrix();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

Matrix ordered_exponential(const MatrixPath& path, double u0, double u1,
                           std::optional<int> steps, MagnusOrder order) {
  const double length = u1 - u0;
  Matrix first = path(u0);
  require_antihermitian(first);
  const Eigen::Index n = first.rows();
  if (length == 0.0) return Matrix::Identity(n, n);

  int count = 0;
  if (steps) {
    if (*steps < 1) throw ValidationError("steps", "must be positive");
    count = *steps;
  } else {
    double peak = first.norm();
    for (int i = 1; i <= 64; ++i) peak = std::max(peak, path(u0 + length * i / 64.0).norm());
    count = std::max(1, static_cast<int>(std::ceil(40.0 * std::abs(length) * peak)));
  }

  const double h = length / count;
  Matrix result = Matrix::Identity(n, n);
  if (order == MagnusOrder::second) {
    for (int k = 0; k < count; ++k) {
      const Matrix a = path(u0 + (k + 0.5) * h);
      require_antihermitian(a);
      result = expm_antihermitian(h * a) * result;
    }
    return result;
  }

  const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double w = std::sqrt(3.0) / 12.0 * h * h;
  for (int k = 0; k < count; ++k) {
    const Matrix a1 = path(u0 + (k + c1) * h);
    const Matrix a2 = path(u0 + (k + c2) * h);
    require_antihermitian(a1);
    require_antihermitian(a2);
    Matrix omega = 0.5 * h * (a1 + a2);
    if (n > 1) omega += w * (a2 * a1 - a1 * a2);
    result = expm_antihermitian(omega) * result;
  }
  return result;
}

SlopeFit fit_slope(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw ValidationError("pairs", "need at least 3 points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [p, e] : pairs) {
    if (!(p > 0.0) || !(e > 0.0) || !std::isfinite(p) || !std::isfinite(e))
      throw ValidationError("pairs", "entries must be finite and positive");
    lx.push_back(std::log(p));
    ly.push_back(std::log(e));
  }
  const double m = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("pairs", "parameters must not all coincide");
  SlopeFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

}  // namespace adiascat::numerics
