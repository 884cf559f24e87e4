#pragma once

// Textbook sequence-network interconnections for a fault behind Thevenin
// impedances Z0, Z1, Z2 with pre-fault voltage E. z_f sits in each faulted
// phase, z_g between the fault point and ground. Returns phase currents
// flowing into the fault.

#include <complex>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

inline Eigen::Vector3cd seq_to_abc(cd i0, cd i1, cd i2) {
    const cd a = std::polar(1.0, 2.0 * 3.14159265358979323846 / 3.0);
    return {i0 + i1 + i2, i0 + a * a * i1 + a * i2, i0 + a * i1 + a * a * i2};
}

// Phase a to ground.
inline Eigen::Vector3cd slg(cd e, cd z0, cd z1, cd z2, cd z_f, cd z_g) {
    const cd i = e / (z0 + z1 + z2 + 3.0 * (z_f + z_g));
    return seq_to_abc(i, i, i);
}

// Phases b and c, ungrounded. The star of z_f puts 2 z_f between b and c.
inline Eigen::Vector3cd ll(cd e, cd z1, cd z2, cd z_f) {
    const cd i1 = e / (z1 + z2 + 2.0 * z_f);
    return seq_to_abc(0.0, i1, -i1);
}

// Phases b and c to ground.
inline Eigen::Vector3cd llg(cd e, cd z0, cd z1, cd z2, cd z_f, cd z_g) {
    const cd zz0 = z0 + z_f + 3.0 * z_g, zz2 = z2 + z_f;
    const cd i1 = e / (z1 + z_f + zz2 * zz0 / (zz2 + zz0));
    return seq_to_abc(-i1 * zz2 / (zz2 + zz0), i1, -i1 * zz0 / (zz2 + zz0));
}

// Balanced three-phase.
inline Eigen::Vector3cd three_phase(cd e, cd z1, cd z_f) { return seq_to_abc(0.0, e / (z1 + z_f), 0.0); }

}  // namespace oracle
