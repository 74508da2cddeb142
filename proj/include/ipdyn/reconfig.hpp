#pragma once

#include <vector>

#include "ipdyn/types.hpp"

namespace ipdyn {

/// m x n row-selection matrix of {0,1}: exactly one 1 per row, at most one
/// per column. q_new = P q_old.
struct SelectionMatrix {
  MatX p;

  int kept() const { return static_cast<int>(p.rows()); }
  int original() const { return static_cast<int>(p.cols()); }
};

/// Selection keeping the listed coordinate indices, in the listed order.
/// Throws ValidationError on out-of-range or repeated indices.
SelectionMatrix selection_matrix(const std::vector<int>& keep, int n);

/// Throws ValidationError unless p is a valid {0,1} selection matrix.
void validate_selection(const SelectionMatrix& p);

/// Widen a Jacobian for newly added coordinates the frame does not depend
/// on: [J | 0].
Jacobian augment_jacobian(const Jacobian& jac, int added);

/// Narrow a Jacobian to the kept coordinates: J P^T.
Jacobian reduce_jacobian(const Jacobian& jac, const SelectionMatrix& p);

/// Narrow a generalized inertia directly: P G P^T. Equals reducing every
/// body Jacobian first and re-summing, without the per-body work.
MatX reduce_inertia(const MatX& inertia, const SelectionMatrix& p);

}  // namespace ipdyn
