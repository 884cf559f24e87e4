#pragma once

// Real-split stamping. A complex equation occupies rows (r, r+1) = (re, im)
// and a complex unknown occupies columns (k, k+1). Duplicate triplets sum.

#include <vector>

#include <Eigen/Sparse>

#include "ibrsc/phasor.hpp"

namespace ibrsc {

class Stamper {
  public:
    explicit Stamper(int n = 0) : n_(n) {}

    int size() const { return n_; }
    /// Skips exact zeros.
    void add(int row, int col, double v);
    /// Always records the entry, so structural counts are value-independent.
    void put(int row, int col, double v) { trips_.emplace_back(row, col, v); }
    /// Complex row r gets c * (complex unknown at k).
    void add_complex(int r, int k, Phasor c);
    /// Complex row r gets c * (complex unknown at k) for real c: 2 entries.
    void add_real_coupling(int r, int k, double c);
    /// Real row r gets the linearization Re(conj(G) du) wrt complex unknown at k,
    /// i.e. entries (Re G, Im G). See gradient helpers below.
    void add_gradient(int r, int k, Phasor g);

    const std::vector<Eigen::Triplet<double>>& triplets() const { return trips_; }
    void clear() { trips_.clear(); }
    void append(const Stamper& o);

    Eigen::SparseMatrix<double> matrix() const;
    /// y += M x using the raw triplets.
    void multiply_add(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

  private:
    int n_;
    std::vector<Eigen::Triplet<double>> trips_;
};

/// Read the complex unknown starting at slot k.
inline Phasor get_complex(const Eigen::VectorXd& x, int k) { return {x[k], x[k + 1]}; }
inline void set_complex(Eigen::VectorXd& x, int k, Phasor v) {
    x[k] = v.real();
    x[k + 1] = v.imag();
}
inline void add_complex_to(Eigen::VectorXd& x, int k, Phasor v) {
    x[k] += v.real();
    x[k + 1] += v.imag();
}

// Gradients of real functions of complex unknowns, in the convention used by
// Stamper::add_gradient: d f = Re(conj(G) du).
namespace grad {
/// d Re(c u) / du
inline Phasor re_linear(Phasor c) { return std::conj(c); }
/// d Im(c u) / du
inline Phasor im_linear(Phasor c) { return Phasor(0.0, 1.0) * std::conj(c); }
/// d |u| / du
inline Phasor abs_value(Phasor u) { return u / std::abs(u); }
}  // namespace grad

}  // namespace ibrsc
