#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace ibrsc {

/// Sparse LU with a residual check. Factor once, solve many right-hand sides.
class SparseSolver {
  public:
    SparseSolver() = default;
    explicit SparseSolver(const Eigen::SparseMatrix<double>& a) { factorize(a); }

    /// Throws AssemblyError when the matrix is numerically singular.
    void factorize(const Eigen::SparseMatrix<double>& a);
    /// One step of iterative refinement; throws AssemblyError if the relative
    /// residual stays above 1e-8.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  private:
    Eigen::SparseMatrix<double> a_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    bool ready_ = false;
};

}  // namespace ibrsc
