#include "ibrsc/frt.hpp"

#include <algorithm>
#include <cmath>

#include "ibrsc/errors.hpp"
#include "ibrsc/linearize.hpp"
#include "ibrsc/seq.hpp"

namespace ibrsc {

namespace {

const Phasor kJ{0.0, 1.0};

Phasor unit_or(Phasor v, Phasor fallback) {
    const double m = std::abs(v);
    if (m > 1e-12) return v / m;
    const double mf = std::abs(fallback);
    return mf > 0.0 ? fallback / mf : Phasor(1.0, 0.0);
}

Phasor z_sum_of(Phasor z_eq, std::optional<Phasor> z_filter) {
    return z_filter ? (*z_filter * z_eq) / (*z_filter + z_eq) : z_eq;
}

Phasor filter_current(Phasor v, std::optional<Phasor> z_filter) { return z_filter ? v / *z_filter : Phasor{}; }

std::optional<Phasor> filter_of(const IbrLinearState& pre) {
    return pre.has_filter ? std::optional<Phasor>(pre.z_filter) : std::nullopt;
}

}  // namespace

CsmCurrents csm_conventional(double i1_p, double i1_r, double i2_r, double i_lim) {
    if (std::hypot(i1_p, i1_r) + i2_r <= i_lim) return {i1_p, i1_r, i2_r};
    CsmCurrents out{0.0, i1_r, i2_r};
    if (i1_r + i2_r > i_lim) {
        const double s = i_lim / (i1_r + i2_r);
        out.i1_r = i1_r * s;
        out.i2_r = i2_r * s;
    }
    const double rad = (i_lim - out.i2_r) * (i_lim - out.i2_r) - out.i1_r * out.i1_r;
    out.i1_p = std::min(i1_p, std::sqrt(std::max(rad, 0.0)));
    return out;
}

double i1_max_for(double i2_mag, double max_cos, double i_max) {
    const double rad = i2_mag * i2_mag * max_cos * max_cos - i2_mag * i2_mag + i_max * i_max;
    return -i2_mag * max_cos + std::sqrt(std::max(rad, 0.0));
}

CsmLimits csm_improved(double v2_angle, Phasor i2_actual, double i_max, double delta_i1) {
    CsmLimits out;
    out.delta_i2 = v2_angle + kPi / 2.0;
    out.i2_max = 0.5 * i_max;
    out.i1_max = i1_max_for(std::abs(i2_actual), seq::max_cos_offset(delta_i1, out.delta_i2), i_max);
    return out;
}

IbrOperatingPoint prefault_point(const IbrLinearState& pre, const IbrUnit& unit) {
    IbrOperatingPoint op;
    op.id = pre.id;
    op.mode = pre.mode;
    op.v0_lv = pre.v0_pre;
    op.v1_lv = pre.v1_pre;
    op.v2_lv = pre.v2_pre;
    op.i1 = pre.i1_pre;
    op.i2 = pre.i2_pre;
    op.i1_lv = pre.i1_lv_pre;
    op.i2_lv = pre.i2_lv_pre;
    op.e1 = pre.e1_pre;
    op.q = pre.q_ref;
    op.csm.variant = unit.csm;
    op.csm.i_lim = unit.i_max;
    op.vic.phi = unit.phi;
    op.vic.e1 = pre.e1_pre;
    return op;
}

Phasor vic_current(Phasor e1, Phasor v_eq, Phasor z_eq, std::optional<Phasor> z_filter, Phasor z_vi) {
    const Phasor zs = z_sum_of(z_eq, z_filter);
    return (e1 - zs / z_eq * v_eq) / (zs + z_vi);
}

double vic_virtual_resistance(Phasor e1, Phasor v_eq, Phasor z_eq, std::optional<Phasor> z_filter, double phi,
                              double i1_max) {
    const Phasor zs = z_sum_of(z_eq, z_filter);
    const double num = std::abs(e1 - zs / z_eq * v_eq);
    const double a = zs.real() + phi * zs.imag();
    const double zeta2 = std::norm(zs) - num * num / (i1_max * i1_max);
    const double disc = a * a - (1.0 + phi * phi) * zeta2;
    if (disc < 0.0) throw InfeasibleLimit("virtual resistance has no real solution (discriminant " + std::to_string(disc) + ")");
    return (-a + std::sqrt(disc)) / (1.0 + phi * phi);
}

Phasor vic_negative_sequence(Phasor v2, double k_factor, double i2_max, double e_angle) {
    const double vm = std::abs(v2);
    if (vm == 0.0 || k_factor == 0.0 || !(i2_max > 0.0)) return {};
    const Phasor vdq = std::conj(v2) * std::polar(1.0, e_angle);
    const double rho = std::max(1.0, k_factor * vm / i2_max);
    const double id = k_factor * vdq.imag() / rho;
    const double iq = -k_factor * vdq.real() / rho;
    return std::polar(std::hypot(id, iq), e_angle - std::atan2(iq, id));
}

IbrOperatingPoint gfl_step(const IbrOperatingPoint& op, const IbrLinearState& pre, const IbrUnit& unit) {
    IbrOperatingPoint out = op;
    const double k = unit.k_factor;
    const double i_max = unit.i_max;
    const Phasor v1 = op.v1_lv, v2 = op.v2_lv;
    const Phasor u1 = unit_or(v1, pre.v1_pre);
    const Phasor ref = pre.i1_pre * std::conj(unit_or(pre.v1_pre, 1.0));
    const double i1_p = ref.real();
    const double i1_r = -ref.imag() + k * std::max(0.0, std::abs(pre.v1_pre) - std::abs(v1));
    const Phasor i1_ref = Phasor(i1_p, -i1_r) * u1;
    out.dv2 = v2 - pre.v2_pre;

    CsmState& cs = out.csm;
    cs.variant = unit.csm;
    cs.i_lim = i_max;
    Phasor i1, i2;
    if (unit.csm == CsmVariant::Improved) {
        cs.i2_max = 0.5 * i_max;
        out.i2_support = vic_negative_sequence(out.dv2, k, std::max(0.0, cs.i2_max - std::abs(pre.i2_pre)), std::arg(v1));
        i2 = pre.i2_pre + out.i2_support;
        cs.delta_i1 = std::arg(i1_ref);
        cs.delta_i2 = std::arg(i2);
        cs.i1_max = i1_max_for(std::abs(i2), seq::max_cos_offset(cs.delta_i1, cs.delta_i2), i_max);
        cs.active = std::abs(i1_ref) > cs.i1_max;
        i1 = cs.active ? i1_ref * (cs.i1_max / std::abs(i1_ref)) : i1_ref;
    } else {
        out.i2_support = k * kJ * out.dv2;
        const Phasor i2u = pre.i2_pre + out.i2_support;
        const CsmCurrents c = csm_conventional(std::abs(i1_p), std::abs(i1_r), std::abs(i2u), i_max);
        cs.active = c.i1_p != std::abs(i1_p) || c.i1_r != std::abs(i1_r) || c.i2_r != std::abs(i2u);
        i1 = Phasor(std::copysign(c.i1_p, i1_p), -std::copysign(c.i1_r, i1_r)) * u1;
        i2 = std::abs(i2u) > 0.0 ? i2u * (c.i2_r / std::abs(i2u)) : Phasor{};
        cs.i1_max = i_max - c.i2_r;
        cs.i2_max = i_max;
        cs.delta_i1 = std::arg(i1);
        cs.delta_i2 = std::arg(i2);
    }
    if (std::abs(i2) > std::abs(i1)) i2 *= std::abs(i1) / std::abs(i2);
    const Phasor pq = std::conj(i1 * std::conj(u1));
    cs.i1_p = pq.real();
    cs.i1_r = pq.imag();
    cs.i2_r = std::abs(i2);

    const auto zf = filter_of(pre);
    out.i1 = i1;
    out.i2 = i2;
    out.i1_lv = i1 - filter_current(v1, zf);
    out.i2_lv = i2 - filter_current(v2, zf);
    out.q = (v1 * std::conj(out.i1_lv) + out.i2_lv * std::conj(v2)).imag();
    return out;
}

IbrOperatingPoint vic_step(const IbrOperatingPoint& op, const TheveninIbr& th, const IbrLinearState& pre,
                           const IbrUnit& unit) {
    IbrOperatingPoint out = op;
    const auto zf = filter_of(pre);
    const double k = unit.k_factor;
    const double i_max = unit.i_max;
    const double phi = unit.phi;
    const Phasor e1 = op.e1;
    const double e_ang = std::arg(e1);
    out.dv2 = op.v2_lv - pre.v2_pre;

    VicState& vs = out.vic;
    vs.phi = phi;
    vs.e1 = e1;
    vs.z_sum = z_sum_of(th.z_eq, zf);
    vs.z_eq = th.z_eq;
    vs.v_eq = th.v_eq;
    vs.active = false;
    vs.infeasible = false;
    const Phasor i1u = vic_current(e1, th.v_eq, th.z_eq, zf, 0.0);
    vs.i1_unconstrained = std::abs(i1u);

    double i1_max = i_max;
    Phasor i1 = i1u, i2, support;
    double r = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double i2_max = 0.5 * i1_max;
        support = vic_negative_sequence(out.dv2, k, std::max(0.0, i2_max - std::abs(pre.i2_pre)), e_ang);
        i2 = pre.i2_pre + support;
        vs.active = std::abs(i1u) > i1_max;
        vs.infeasible = false;
        r = 0.0;
        i1 = i1u;
        if (vs.active) {
            try {
                r = vic_virtual_resistance(e1, th.v_eq, th.z_eq, zf, phi, i1_max);
                i1 = vic_current(e1, th.v_eq, th.z_eq, zf, Phasor(r, phi * r));
            } catch (const InfeasibleLimit&) {
                vs.infeasible = true;
                i1 = i1u * (i1_max / std::abs(i1u));
            }
        }
        const double next = i1_max_for(std::abs(i2), seq::max_cos_offset(std::arg(i1), std::arg(i2)), i_max);
        const bool done = std::abs(next - i1_max) < 1e-14;
        i1_max = next;
        if (done) break;
    }
    if (std::abs(i2) > std::abs(i1)) i2 *= std::abs(i1) / std::abs(i2);

    const Phasor z_vi(r, phi * r);
    vs.r_vi = r;
    vs.x_vi = phi * r;
    vs.i1_max = i1_max;
    vs.i2_max = 0.5 * i1_max;
    const double kappa = unit.kappa ? *unit.kappa : 0.1 * i1_max;
    vs.i_th = i1_max - kappa;
    vs.v_drop = std::abs(z_vi * i1);
    vs.sigma = vs.i_th > 0.0 ? vs.v_drop / (i1_max * vs.i_th * std::sqrt(1.0 + phi * phi)) : 0.0;

    const Phasor v1_lv = e1 - z_vi * i1;
    const Phasor v2_lv = op.v2_lv;
    out.i1 = i1;
    out.i2 = i2;
    out.i2_support = support;
    out.i1_lv = i1 - filter_current(v1_lv, zf);
    out.i2_lv = i2 - filter_current(v2_lv, zf);
    out.q = (v1_lv * std::conj(out.i1_lv) + out.i2_lv * std::conj(v2_lv)).imag();
    out.e1 = std::polar(pre.v_ref + unit.k_v * (pre.q_ref - out.q), e_ang);
    return out;
}

}  // namespace ibrsc
