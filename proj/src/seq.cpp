#include "ibrsc/seq.hpp"

#include <algorithm>

namespace ibrsc::seq {

namespace {

Mat3 make_synthesis() {
    const Phasor a = a_op;
    const Phasor a2 = a * a;
    Mat3 m;
    m << 1.0, 1.0, 1.0,
         1.0, a2, a,
         1.0, a, a2;
    return m;
}

Mat3 make_analysis() {
    const Phasor a = a_op;
    const Phasor a2 = a * a;
    Mat3 m;
    m << 1.0, 1.0, 1.0,
         1.0, a, a2,
         1.0, a2, a;
    return m / 3.0;
}

constexpr double kOffsets[3] = {0.0, 2.0 * kPi / 3.0, -2.0 * kPi / 3.0};

}  // namespace

const Mat3& synthesis() {
    static const Mat3 m = make_synthesis();
    return m;
}

const Mat3& analysis() {
    static const Mat3 m = make_analysis();
    return m;
}

Vec3 to_sequence(const Vec3& abc) { return analysis() * abc; }
Vec3 to_phase(const Vec3& s012) { return synthesis() * s012; }

SequenceTriple to_sequence(const PhaseTriple& v) {
    const Vec3 s = to_sequence(Vec3(v.a, v.b, v.c));
    return {s(0), s(1), s(2)};
}

PhaseTriple to_phase(const SequenceTriple& s) {
    const Vec3 p = to_phase(Vec3(s.s0, s.s1, s.s2));
    return {p(0), p(1), p(2)};
}

Mat3 phase_matrix_from_sequence(Phasor y0, Phasor y1, Phasor y2) {
    Vec3 d(y0, y1, y2);
    return synthesis() * d.asDiagonal() * analysis();
}

std::array<double, 3> phase_current_magnitudes(Phasor i1, Phasor i2) {
    const double m1 = std::abs(i1);
    const double m2 = std::abs(i2);
    const double dd = std::arg(i1) - std::arg(i2);
    std::array<double, 3> out{};
    for (int p = 0; p < 3; ++p) {
        const double sq = m1 * m1 + m2 * m2 + 2.0 * m1 * m2 * std::cos(dd + kOffsets[p]);
        out[p] = std::sqrt(std::max(sq, 0.0));
    }
    return out;
}

double max_cos_offset(double delta_i1, double delta_i2) {
    double best = -1.0;
    for (double off : kOffsets) best = std::max(best, std::cos(delta_i1 - delta_i2 + off));
    return best;
}

}  // namespace ibrsc::seq
