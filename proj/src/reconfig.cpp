#include "ipdyn/reconfig.hpp"

#include <set>

#include "ipdyn/errors.hpp"

namespace ipdyn {

SelectionMatrix selection_matrix(const std::vector<int>& keep, int n) {
  std::set<int> seen;
  MatX p = MatX::Zero(static_cast<int>(keep.size()), n);
  for (size_t r = 0; r < keep.size(); ++r) {
    const int c = keep[r];
    if (c < 0 || c >= n) throw ValidationError("selection", "index out of range");
    if (!seen.insert(c).second) throw ValidationError("selection", "repeated index");
    p(static_cast<int>(r), c) = 1.0;
  }
  return {p};
}

void validate_selection(const SelectionMatrix& sel) {
  const MatX& p = sel.p;
  if (p.rows() > p.cols()) throw ValidationError("selection", "more rows than columns");
  for (int r = 0; r < p.rows(); ++r) {
    int ones = 0;
    for (int c = 0; c < p.cols(); ++c) {
      if (p(r, c) == 1.0) {
        ++ones;
      } else if (p(r, c) != 0.0) {
        throw ValidationError("selection", "entries must be 0 or 1");
      }
    }
    if (ones != 1) throw ValidationError("selection", "each row must have exactly one 1");
  }
  for (int c = 0; c < p.cols(); ++c) {
    if (p.col(c).sum() > 1.0) {
      throw ValidationError("selection", "each column may have at most one 1");
    }
  }
}

Jacobian augment_jacobian(const Jacobian& jac, int added) {
  if (added < 0) throw ValidationError("augment", "added count must be >= 0");
  Jacobian out = Jacobian::Zero(6, jac.cols() + added);
  out.leftCols(jac.cols()) = jac;
  return out;
}

Jacobian reduce_jacobian(const Jacobian& jac, const SelectionMatrix& p) {
  validate_selection(p);
  if (p.original() != jac.cols()) throw ValidationError("selection", "shape mismatch");
  return jac * p.p.transpose();
}

MatX reduce_inertia(const MatX& inertia, const SelectionMatrix& p) {
  validate_selection(p);
  if (p.original() != inertia.rows() || inertia.rows() != inertia.cols()) {
    throw ValidationError("selection", "shape mismatch");
  }
  return p.p * inertia * p.p.transpose();
}

}  // namespace ipdyn
