#include "ibrsc/stamps.hpp"

namespace ibrsc {

void Stamper::add(int row, int col, double v) {
    if (v != 0.0) trips_.emplace_back(row, col, v);
}

void Stamper::add_complex(int r, int k, Phasor c) {
    if (c == Phasor{}) return;
    trips_.emplace_back(r, k, c.real());
    trips_.emplace_back(r, k + 1, -c.imag());
    trips_.emplace_back(r + 1, k, c.imag());
    trips_.emplace_back(r + 1, k + 1, c.real());
}

void Stamper::add_real_coupling(int r, int k, double c) {
    if (c == 0.0) return;
    trips_.emplace_back(r, k, c);
    trips_.emplace_back(r + 1, k + 1, c);
}

void Stamper::add_gradient(int r, int k, Phasor g) {
    trips_.emplace_back(r, k, g.real());
    trips_.emplace_back(r, k + 1, g.imag());
}

void Stamper::append(const Stamper& o) { trips_.insert(trips_.end(), o.trips_.begin(), o.trips_.end()); }

Eigen::SparseMatrix<double> Stamper::matrix() const {
    Eigen::SparseMatrix<double> m(n_, n_);
    m.setFromTriplets(trips_.begin(), trips_.end());
    m.makeCompressed();
    return m;
}

void Stamper::multiply_add(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    for (const auto& t : trips_) y[t.row()] += t.value() * x[t.col()];
}

}  // namespace ibrsc
