#include "ibrsc/linear_solver.hpp"

#include <cmath>
#include <string>

#include "ibrsc/errors.hpp"

namespace ibrsc {

void SparseSolver::factorize(const Eigen::SparseMatrix<double>& a) {
    a_ = a;
    a_.makeCompressed();
    lu_.analyzePattern(a_);
    lu_.factorize(a_);
    ready_ = lu_.info() == Eigen::Success;
    if (!ready_) throw AssemblyError("matrix is numerically singular: " + lu_.lastErrorMessage());
    // SparseLU accepts some rank-deficient inputs; catch those by a tiny pivot.
    if (!std::isfinite(lu_.logAbsDeterminant())) {
        ready_ = false;
        throw AssemblyError("matrix is numerically singular");
    }
}

Eigen::VectorXd SparseSolver::solve(const Eigen::VectorXd& b) const {
    if (!ready_) throw AssemblyError("solve called before a successful factorization");
    Eigen::VectorXd x = lu_.solve(b);
    Eigen::VectorXd r = b - a_ * x;
    x += lu_.solve(r);
    r = b - a_ * x;
    const double bn = b.lpNorm<Eigen::Infinity>();
    const double rn = r.lpNorm<Eigen::Infinity>();
    if (!x.allFinite() || rn > 1e-8 * std::max(bn, 1.0))
        throw AssemblyError("linear solve residual " + std::to_string(rn) + " too large; matrix is numerically singular");
    return x;
}

}  // namespace ibrsc
