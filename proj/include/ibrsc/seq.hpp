#pragma once

// Symmetrical components (Fortescue). The analysis matrix carries the 1/3
// factor, the synthesis matrix is unscaled:
//   [a b c]^T = A [s0 s1 s2]^T,   [s0 s1 s2]^T = A^-1 [a b c]^T.

#include <array>

#include "ibrsc/phasor.hpp"

namespace ibrsc {

struct PhaseTriple {
    Phasor a{}, b{}, c{};
    Phasor operator[](int p) const { return p == 0 ? a : (p == 1 ? b : c); }
    Phasor& operator[](int p) { return p == 0 ? a : (p == 1 ? b : c); }
};

struct SequenceTriple {
    Phasor s0{}, s1{}, s2{};
    Phasor operator[](int k) const { return k == 0 ? s0 : (k == 1 ? s1 : s2); }
    Phasor& operator[](int k) { return k == 0 ? s0 : (k == 1 ? s1 : s2); }
};

namespace seq {

/// The 1 at 120 degrees rotation operator.
inline const Phasor a_op{-0.5, 0.8660254037844386};

/// Synthesis matrix A (sequence -> phase).
const Mat3& synthesis();
/// Analysis matrix A^-1 (phase -> sequence), includes the 1/3 factor.
const Mat3& analysis();

SequenceTriple to_sequence(const PhaseTriple& v);
PhaseTriple to_phase(const SequenceTriple& s);

Vec3 to_sequence(const Vec3& abc);
Vec3 to_phase(const Vec3& s012);

/// Phase matrix of a sequence-diagonal element: A diag(y0, y1, y2) A^-1.
Mat3 phase_matrix_from_sequence(Phasor y0, Phasor y1, Phasor y2);

/// Phase current magnitudes from positive and negative sequence currents,
/// using the angle offsets {0, +2pi/3, -2pi/3} for phases a, b, c.
std::array<double, 3> phase_current_magnitudes(Phasor i1, Phasor i2);

/// Max over phases of cos(d1 - d2 + offset).
double max_cos_offset(double delta_i1, double delta_i2);

}  // namespace seq
}  // namespace ibrsc
