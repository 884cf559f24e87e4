#pragma once

// Fault ride-through current limiters in the phasor domain. All currents and
// impedances are on the unit's own rating; voltages are shared per-unit.
//
// Sequence currents are converter-side unless suffixed _lv (injected at the LV
// terminal after the shunt filter).

#include <optional>
#include <string>

#include "ibrsc/netmodel.hpp"

namespace ibrsc {

struct IbrLinearState;

struct CsmCurrents {
    double i1_p = 0.0;
    double i1_r = 0.0;
    double i2_r = 0.0;
};

/// Conventional CSM: |I1| + |I2| <= i_lim with reactive priority.
CsmCurrents csm_conventional(double i1_p, double i1_r, double i2_r, double i_lim);

struct CsmLimits {
    double i1_max = 0.0;
    double i2_max = 0.0;
    double delta_i2 = 0.0;
};

/// Largest |I1| keeping every phase current at or below i_max, for a given
/// |I2| and max over phases of cos(delta_i1 - delta_i2 + offset).
double i1_max_for(double i2_mag, double max_cos, double i_max);

/// Improved CSM limits. delta_i2 leads the LV negative-sequence voltage by 90
/// degrees; i2_max = i_max / 2; i1_max uses the actual |I2| and delta_i1.
CsmLimits csm_improved(double v2_angle, Phasor i2_actual, double i_max, double delta_i1);

struct CsmState {
    CsmVariant variant = CsmVariant::Improved;
    double i1_p = 0.0, i1_r = 0.0, i2_r = 0.0;
    double i_lim = 1.1;
    double i1_max = 0.0, i2_max = 0.0;
    double delta_i1 = 0.0, delta_i2 = 0.0;
    bool active = false;
};

struct VicState {
    double r_vi = 0.0, x_vi = 0.0;
    double phi = 3.0;
    double sigma = 0.0;
    double i_th = 0.0;
    double v_drop = 0.0;
    double i1_max = 0.0, i2_max = 0.0;
    double i1_unconstrained = 0.0;
    Phasor e1;
    Phasor z_sum;
    Phasor z_eq, v_eq;  // Thevenin used by the last update, unit base
    bool active = false;
    bool infeasible = false;  // negative discriminant, radial fallback used
};

struct IbrOperatingPoint {
    std::string id;
    IbrMode mode = IbrMode::GFL;
    Phasor v0_lv, v1_lv, v2_lv;  // measured at the LV terminal
    Phasor i1, i2;               // converter side
    Phasor i1_lv, i2_lv;         // injected at the LV terminal
    Phasor i2_support;           // negative-sequence support added to the pre-fault I2
    Phasor dv2;                  // V2 - V2_pre, input of the support law
    Phasor e1;                   // GFM internal EMF
    double q = 0.0;
    CsmState csm;
    VicState vic;
};

/// Pre-fault operating point of an IBR as seen by the limiters.
IbrOperatingPoint prefault_point(const IbrLinearState& pre, const IbrUnit& unit);

/// Unconstrained positive-sequence converter current with series Z_VI.
Phasor vic_current(Phasor e1, Phasor v_eq, Phasor z_eq, std::optional<Phasor> z_filter, Phasor z_vi);

/// Larger root r >= 0 so that Z_VI = r (1 + j phi) gives |I1| = i1_max.
/// Throws InfeasibleLimit when the discriminant is negative.
double vic_virtual_resistance(Phasor e1, Phasor v_eq, Phasor z_eq, std::optional<Phasor> z_filter, double phi,
                              double i1_max);

/// Negative-sequence reference from the dq projection of v2 in the frame of
/// angle e_angle: |I2| = min(k |v2|, i2_max), leading v2 by 90 degrees.
Phasor vic_negative_sequence(Phasor v2, double k_factor, double i2_max, double e_angle);

struct TheveninIbr {
    Phasor z_eq;  // unit base
    Phasor v_eq;
};

/// One VIC update of a GFM from its Thevenin equivalent.
IbrOperatingPoint vic_step(const IbrOperatingPoint& op, const TheveninIbr& th, const IbrLinearState& pre,
                           const IbrUnit& unit);

/// One limiter update of a GFL from the measured LV voltages in `op`.
IbrOperatingPoint gfl_step(const IbrOperatingPoint& op, const IbrLinearState& pre, const IbrUnit& unit);

}  // namespace ibrsc
