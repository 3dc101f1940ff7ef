#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>

#include "adiascat/error.hpp"
#include "adiascat/grid.hpp"

namespace adiascat::numerics {

/// Trapezoid rule over the sampled window. Throws on non-finite samples.
cplx quadrature(std::span<const cplx> samples, double dx);
double quadrature(std::span<const double> samples, double dx);
cplx quadrature(const Grid& grid, std::span<const cplx> samples);

/// Matrix-valued path u -> A(u); A(u) must be anti-Hermitian.
using MatrixPath = std::function<Matrix(double)>;

enum class MagnusOrder { second = 2, fourth = 4 };

/// exp(A) for anti-Hermitian A; unitary to round-off.
Matrix expm_antihermitian(const Matrix& a);

/// Path-ordered exponential T exp(int_{u0}^{u1} A(u) du), later u to the left.
/// u1 < u0 integrates backwards. `steps` defaults to ceil(40 L max|A|).
Matrix ordered_exponential(const MatrixPath& path, double u0, double u1,
                           std::optional<int> steps = std::nullopt,
                           MagnusOrder order = MagnusOrder::second);

/// Richardson-extrapolated central difference (4 D(h/2) - D(h)) / 3, O(h^4).
template <class F>
auto central_derivative(F&& f, double x0, double h) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  if (!(h > 0.0)) throw ValidationError("h", "step must be positive");
  auto diff = [&](double step) -> R { return R((f(x0 + step) - f(x0 - step)) / (2.0 * step)); };
  const R coarse = diff(h);
  const R fine = diff(0.5 * h);
  return R((4.0 * fine - coarse) / 3.0);
}

struct SlopeFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS deviation in log space
};

/// Least-squares line through (log parameter, log error).
SlopeFit fit_slope(std::span<const std::pair<double, double>> pairs);

}  // namespace adiascat::numerics
