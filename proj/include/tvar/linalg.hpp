#pragma once

#include <optional>
#include <vector>

#include "tvar/rat.hpp"

namespace tvar {

// Dense row-major matrix over Q. Rows may be empty (0 x n).
using QMat = std::vector<QVec>;
using ZMat = std::vector<ZVec>;

int rank(QMat a);

// One solution of A x = b, if any.
std::optional<QVec> solve(const QMat& a, const QVec& b);

// Basis of { x : A x = 0 }.
std::vector<QVec> kernel_basis(const QMat& a, size_t ncols);

// Dimension of the affine hull of a point set; -1 for the empty set.
int affine_dim(const std::vector<QVec>& points);

// Integer solutions of A x = b: a particular solution plus a lattice basis
// of the homogeneous integer solutions. nullopt if no integer solution.
struct IntSolveResult {
    ZVec particular;
    std::vector<ZVec> lattice;
};
std::optional<IntSolveResult> solve_integer(ZMat a, ZVec b);

}  // namespace tvar
