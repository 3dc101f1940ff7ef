#include "adiascat/operator.hpp"

#include <algorithm>
#include <memory>

#include "adiascat/error.hpp"

namespace adiascat {

LocalField::LocalField(Grid grid, int channels)
    : grid_(grid), channels_(channels), values_(grid.size(), Matrix::Identity(channels, channels)) {}

StateVector LocalField::apply(const StateVector& state) const {
  if (!(state.grid() == grid_) || state.channels() != channels_)
    throw ValidationError("field", "state does not match field shape");
  Matrix out(channels_, grid_.size());
  for (int i = 0; i < grid_.size(); ++i) out.col(i) = values_[i] * state.amplitudes().col(i);
  return StateVector(grid_, std::move(out));
}

StateVector LocalField::apply_adjoint(const StateVector& state) const {
  if (!(state.grid() == grid_) || state.channels() != channels_)
    throw ValidationError("field", "state does not match field shape");
  Matrix out(channels_, grid_.size());
  for (int i = 0; i < grid_.size(); ++i) out.col(i) = values_[i].adjoint() * state.amplitudes().col(i);
  return StateVector(grid_, std::move(out));
}

LocalField LocalField::adjoint() const {
  LocalField out = *this;
  for (auto& m : out.values_) m.adjointInPlace();
  return out;
}

LocalField LocalField::operator*(const LocalField& other) const {
  LocalField out = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = values_[i] * other.values_[i];
  return out;
}

double LocalField::unitarity_defect() const {
  double worst = 0.0;
  const Matrix id = Matrix::Identity(channels_, channels_);
  for (const auto& m : values_) worst = std::max(worst, (m.adjoint() * m - id).norm());
  return worst;
}

GridOperator GridOperator::identity() {
  GridOperator op;
  op.apply = [](const StateVector& s) { return s; };
  op.apply_adjoint = op.apply;
  op.unitary = true;
  return op;
}

GridOperator GridOperator::from_field(LocalField field, bool unitary) {
  GridOperator op;
  auto shared = std::make_shared<const LocalField>(std::move(field));
  op.apply = [shared](const StateVector& s) { return shared->apply(s); };
  op.apply_adjoint = [shared](const StateVector& s) { return shared->apply_adjoint(s); };
  op.unitary = unitary;
  op.local = *shared;
  return op;
}

}  // namespace adiascat
