#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "adiascat/grid.hpp"

namespace adiascat {

/// Multiplication by an n x n matrix at every grid point.
class LocalField {
 public:
  LocalField(Grid grid, int channels);

  const Grid& grid() const noexcept { return grid_; }
  int channels() const noexcept { return channels_; }
  Matrix& at(int i) { return values_[i]; }
  const Matrix& at(int i) const { return values_[i]; }

  StateVector apply(const StateVector& state) const;
  StateVector apply_adjoint(const StateVector& state) const;
  LocalField adjoint() const;
  /// Pointwise product (this * other).
  LocalField operator*(const LocalField& other) const;

  /// max_i |U_i^dagger U_i - 1|
  double unitarity_defect() const;

 private:
  Grid grid_;
  int channels_;
  std::vector<Matrix> values_;
};

/// Linear map on grid states, with its adjoint when known.
struct GridOperator {
  using Action = std::function<StateVector(const StateVector&)>;

  Action apply;
  Action apply_adjoint;
  bool unitary = false;
  std::optional<LocalField> local;

  StateVector operator()(const StateVector& s) const { return apply(s); }

  static GridOperator identity();
  static GridOperator from_field(LocalField field, bool unitary);
};

}  // namespace adiascat
