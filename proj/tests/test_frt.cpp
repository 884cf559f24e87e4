#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "ibrsc/errors.hpp"
#include "ibrsc/frt.hpp"
#include "ibrsc/linearize.hpp"
#include "ibrsc/scsolver.hpp"
#include "ibrsc/seq.hpp"

using namespace ibrsc;
using Catch::Approx;

namespace {

double max_phase(Phasor i1, Phasor i2) {
    const auto m = seq::phase_current_magnitudes(i1, i2);
    return std::max({m[0], m[1], m[2]});
}

double lead(Phasor i, Phasor v) { return wrap_angle(std::arg(i) - std::arg(v)); }

struct Unit {
    ScContext ctx;
    const IbrLinearState& pre() const { return ctx.lin.ibr("IBR1"); }
    const IbrUnit& unit() const { return ctx.net.ibr("IBR1"); }
};

Unit radial(const std::string& name) { return {prepare_sc(fixtures::load(name))}; }

}  // namespace

TEST_CASE("conventional CSM", "[frt][csm]") {
    const CsmCurrents a = csm_conventional(0.5, 0.3, 0.1, 1.1);
    CHECK(a.i1_p == 0.5);
    CHECK(a.i1_r == 0.3);
    CHECK(a.i2_r == 0.1);

    const CsmCurrents b = csm_conventional(0.4, 1.1, 0.0, 1.1);
    CHECK(b.i1_r == Approx(1.1).margin(1e-15));
    CHECK(b.i1_p == Approx(0.0).margin(1e-15));

    const CsmCurrents c = csm_conventional(1.0, 0.8, 0.6, 1.1);
    const double r1 = 0.8 * 1.1 / 1.4, r2 = 0.6 * 1.1 / 1.4;
    CHECK(c.i1_r == Approx(r1).margin(1e-15));
    CHECK(c.i2_r == Approx(r2).margin(1e-15));
    CHECK(c.i1_p == Approx(std::sqrt(std::max(0.0, (1.1 - r2) * (1.1 - r2) - r1 * r1))).margin(1e-15));
    CHECK(std::hypot(c.i1_p, c.i1_r) + c.i2_r <= 1.1 + 1e-12);
}

TEST_CASE("improved CSM limits", "[frt][csm]") {
    const CsmLimits z = csm_improved(0.4, 0.0, 1.1, 0.1);
    CHECK(z.i1_max == Approx(1.1).margin(1e-15));
    CHECK(z.i2_max == Approx(0.55).margin(1e-15));
    CHECK(z.delta_i2 == Approx(0.4 + kPi / 2).margin(1e-15));

    const double v2a = -0.7;
    const CsmLimits l = csm_improved(v2a, std::polar(0.3, v2a + kPi / 2), 1.1, v2a + kPi / 2);
    CHECK(l.i1_max == Approx(0.8).margin(1e-12));
    CHECK(max_phase(std::polar(l.i1_max, v2a + kPi / 2), std::polar(0.3, v2a + kPi / 2)) ==
          Approx(1.1).margin(1e-12));

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ang(-kPi, kPi), mag(0.0, 0.55);
    for (int k = 0; k < 2000; ++k) {
        const double d1 = ang(rng), v2 = ang(rng), m2 = mag(rng);
        const CsmLimits c = csm_improved(v2, std::polar(m2, v2 + kPi / 2), 1.1, d1);
        REQUIRE(max_phase(std::polar(c.i1_max, d1), std::polar(m2, c.delta_i2)) == Approx(1.1).margin(1e-9));
        REQUIRE(c.i1_max >= m2 - 1e-12);
    }
}

TEST_CASE("VIC virtual resistance by back-substitution", "[frt][vic]") {
    // Remote source absent, large impedances: I1 = 1 / (Z_sum + Z_VI).
    const Phasor z_eq{0.0, 40.0}, zf{0.0, -60.0};
    // Z_sum = j120, so |1 / (j120 + r)| = 0.005 gives r = 160.
    const double r0 = vic_virtual_resistance(1.0, 0.0, z_eq, zf, 0.0, 0.005);
    CHECK(r0 == Approx(160.0).margin(1e-9));
    CHECK(std::abs(vic_current(1.0, 0.0, z_eq, zf, r0)) == Approx(0.005).margin(1e-8));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int k = 0; k < 2000; ++k) {
        const Phasor e1 = std::polar(0.9 + 0.2 * u(rng), 0.5 * (u(rng) - 0.5));
        const Phasor v_eq = std::polar(0.8 * u(rng), 2.0 * kPi * u(rng));
        const Phasor ze{0.05 * u(rng), 0.02 + 0.3 * u(rng)};
        const std::optional<Phasor> f = u(rng) < 0.5 ? std::optional<Phasor>(Phasor(0.0, -20.0 - 20.0 * u(rng)))
                                                     : std::nullopt;
        const double phi = 1.0 + 4.0 * u(rng);
        if (std::abs(vic_current(e1, v_eq, ze, f, 0.0)) <= 1.1) continue;
        const double r = vic_virtual_resistance(e1, v_eq, ze, f, phi, 1.1);
        REQUIRE(r >= 0.0);
        REQUIRE(std::abs(std::abs(vic_current(e1, v_eq, ze, f, Phasor(r, phi * r))) - 1.1) < 1e-8);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("VIC without a real root", "[frt][vic]") {
    // Z_sum normal to (1, phi) and the target current not binding.
    CHECK_THROWS_AS(vic_virtual_resistance(1.0, 0.0, Phasor(3.0, -1.0), std::nullopt, 3.0, 0.5), InfeasibleLimit);
}

TEST_CASE("VIC negative-sequence reference", "[frt][vic]") {
    CHECK(std::abs(vic_negative_sequence(0.0, 2.0, 0.55, 0.3)) == 0.0);

    const Phasor v2 = std::polar(0.1, -1.2);
    const Phasor i2 = vic_negative_sequence(v2, 2.0, 0.55, 0.3);
    CHECK(std::abs(i2) == Approx(0.2).margin(1e-15));
    CHECK(lead(i2, v2) == Approx(kPi / 2).margin(1e-12));

    const Phasor big = std::polar(0.5, 2.0);
    const Phasor s = vic_negative_sequence(big, 2.0, 0.55, -0.8);
    CHECK(std::abs(s) == Approx(0.55).margin(1e-15));
    CHECK(lead(s, big) == Approx(kPi / 2).margin(1e-12));

    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ang(-kPi, kPi), mag(1e-4, 0.6);
    for (int k = 0; k < 2000; ++k) {
        const Phasor v = std::polar(mag(rng), ang(rng));
        const Phasor i = vic_negative_sequence(v, 2.0, 0.55, ang(rng));
        REQUIRE(std::abs(lead(i, v) - kPi / 2) < 1e-9);
        REQUIRE(std::abs(std::abs(i) - std::min(2.0 * std::abs(v), 0.55)) < 1e-12);
    }
}

TEST_CASE("GFL limiter", "[frt][gfl]") {
    const Unit u = radial("gfl_radial");
    const IbrOperatingPoint op0 = prefault_point(u.pre(), u.unit());

    SECTION("healthy voltage returns the setpoint") {
        const IbrOperatingPoint h = gfl_step(op0, u.pre(), u.unit());
        CHECK(std::abs(h.i1 - u.pre().i1_pre) < 1e-12);
        CHECK(std::abs(h.i2 - u.pre().i2_pre) < 1e-12);
        CHECK(std::abs(h.i1_lv - u.pre().i1_lv_pre) < 1e-12);
        CHECK_FALSE(h.csm.active);
    }
    SECTION("balanced dip saturates the positive sequence") {
        IbrOperatingPoint op = op0;
        op.v1_lv = 0.3 * u.pre().v1_pre;
        const IbrOperatingPoint s = gfl_step(op, u.pre(), u.unit());
        CHECK(s.csm.active);
        CHECK(std::abs(s.i2 - u.pre().i2_pre) < 1e-12);
        CHECK(max_phase(s.i1, s.i2) == Approx(1.1).margin(1e-6));
    }
    SECTION("unbalanced dip uses the full rating") {
        IbrOperatingPoint op = op0;
        op.v1_lv = 0.6 * u.pre().v1_pre;
        op.v2_lv = std::polar(0.3, 1.0);
        const IbrOperatingPoint s = gfl_step(op, u.pre(), u.unit());
        CHECK(max_phase(s.i1, s.i2) == Approx(1.1).margin(1e-9));
        CHECK(std::abs(s.i1) >= std::abs(s.i2));
        CHECK(lead(s.i2_support, s.dv2) == Approx(kPi / 2).margin(1e-9));

        IbrUnit conv = u.unit();
        conv.csm = CsmVariant::Conventional;
        const IbrOperatingPoint c = gfl_step(op, u.pre(), conv);
        CHECK(max_phase(c.i1, c.i2) < 1.1 - 1e-3);
    }
    SECTION("ceiling and ordering over random terminal voltages") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> m(0.0, 1.1), a(-kPi, kPi), m2(0.0, 0.6);
        for (int k = 0; k < 2000; ++k) {
            IbrOperatingPoint op = op0;
            op.v1_lv = std::polar(m(rng), a(rng));
            op.v2_lv = std::polar(m2(rng), a(rng));
            for (CsmVariant v : {CsmVariant::Improved, CsmVariant::Conventional}) {
                IbrUnit un = u.unit();
                un.csm = v;
                const IbrOperatingPoint s = gfl_step(op, u.pre(), un);
                REQUIRE(max_phase(s.i1, s.i2) <= 1.1 * (1.0 + 1e-9));
                REQUIRE(std::abs(s.i1) >= std::abs(s.i2) - 1e-12);
                if (v == CsmVariant::Improved && s.csm.active)
                    REQUIRE(max_phase(s.i1, s.i2) == Approx(1.1).margin(1e-9));
            }
        }
    }
}

TEST_CASE("VIC step of a grid-forming unit", "[frt][vic]") {
    const Unit u = radial("gfm_radial");
    const IbrOperatingPoint op0 = prefault_point(u.pre(), u.unit());

    SECTION("bolted balanced fault") {
        const TheveninIbr th{Phasor(1e-6, 1e-6), 0.0};
        const IbrOperatingPoint s = vic_step(op0, th, u.pre(), u.unit());
        CHECK(s.vic.active);
        CHECK(std::abs(std::abs(s.i1) - s.vic.i1_max) < 1e-8);
        CHECK(s.vic.i1_max == Approx(1.1).margin(1e-3));
        CHECK(std::abs(s.i2 - u.pre().i2_pre) < 1e-12);
        CHECK(max_phase(s.i1, s.i2) <= 1.1 * (1.0 + 1e-9));
    }
    SECTION("unsaturated negative-sequence support") {
        IbrOperatingPoint op = op0;
        op.v2_lv = u.pre().v2_pre + std::polar(0.05, 0.7);
        const TheveninIbr th{Phasor(0.0, 0.3), 0.7};
        const IbrOperatingPoint s = vic_step(op, th, u.pre(), u.unit());
        CHECK(std::abs(s.i2_support) == Approx(2.0 * 0.05).margin(1e-8));
        CHECK(lead(s.i2_support, s.dv2) == Approx(kPi / 2).margin(1e-9));
    }
    SECTION("deeper faults never exceed the limit") {
        for (double v = 1.0; v >= 0.0; v -= 0.05) {
            const IbrOperatingPoint s = vic_step(op0, TheveninIbr{Phasor(0.01, 0.1), v}, u.pre(), u.unit());
            REQUIRE(std::abs(s.i1) <= s.vic.i1_max * (1.0 + 1e-9));
            REQUIRE(max_phase(s.i1, s.i2) <= 1.1 * (1.0 + 1e-9));
            if (s.vic.active) {
                const Phasor i1 = vic_current(s.vic.e1, v, Phasor(0.01, 0.1), u.pre().z_filter,
                                              Phasor(s.vic.r_vi, s.vic.x_vi));
                REQUIRE(std::abs(std::abs(i1) - s.vic.i1_max) < 1e-8);
            }
        }
    }
}
