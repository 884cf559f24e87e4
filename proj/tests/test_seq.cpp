#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ibrsc/netmodel.hpp"
#include "ibrsc/seq.hpp"

using namespace ibrsc;

namespace {

PhaseTriple pt(Phasor a, Phasor b, Phasor c) { return {a, b, c}; }

double dist(const SequenceTriple& x, const SequenceTriple& y) {
    return std::max({std::abs(x.s0 - y.s0), std::abs(x.s1 - y.s1), std::abs(x.s2 - y.s2)});
}
double dist(const PhaseTriple& x, const PhaseTriple& y) {
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c)});
}

}  // namespace

TEST_CASE("balanced and common-mode sets", "[seq]") {
    const PhaseTriple pos = pt(1.0, std::polar(1.0, -2 * kPi / 3), std::polar(1.0, 2 * kPi / 3));
    CHECK(dist(seq::to_sequence(pos), {0.0, 1.0, 0.0}) < 1e-12);
    CHECK(dist(seq::to_sequence(pt(1.0, 1.0, 1.0)), {1.0, 0.0, 0.0}) < 1e-12);
    CHECK(dist(seq::to_sequence(pt(1.0, 0.0, 0.0)), {1.0 / 3, 1.0 / 3, 1.0 / 3}) < 1e-12);
}

TEST_CASE("to_phase of single sequences", "[seq]") {
    CHECK(dist(seq::to_phase(SequenceTriple{0.0, 1.0, 0.0}),
               pt(1.0, std::polar(1.0, -2 * kPi / 3), std::polar(1.0, 2 * kPi / 3))) < 1e-12);
    CHECK(dist(seq::to_phase(SequenceTriple{0.0, 0.0, 1.0}),
               pt(1.0, std::polar(1.0, 2 * kPi / 3), std::polar(1.0, -2 * kPi / 3))) < 1e-12);
}

TEST_CASE("round trip, energy and matrix identities", "[seq]") {
    CHECK((seq::synthesis() * seq::analysis() - Mat3::Identity()).norm() < 1e-13);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 1000; ++k) {
        const PhaseTriple x = pt({u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)});
        const SequenceTriple s = seq::to_sequence(x);
        CHECK(dist(seq::to_phase(s), x) < 1e-12);
        const double ep = std::norm(x.a) + std::norm(x.b) + std::norm(x.c);
        const double es = 3.0 * (std::norm(s.s0) + std::norm(s.s1) + std::norm(s.s2));
        CHECK(std::abs(ep - es) < 1e-10);
    }
}

TEST_CASE("phase current magnitudes", "[seq]") {
    const auto m0 = seq::phase_current_magnitudes(std::polar(0.8, 0.3), 0.0);
    for (double m : m0) CHECK(m == Catch::Approx(0.8).margin(1e-12));

    const auto m1 = seq::phase_current_magnitudes(1.0, 1.0);
    CHECK(m1[0] == Catch::Approx(2.0).margin(1e-12));
    CHECK(m1[1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(m1[2] == Catch::Approx(1.0).margin(1e-12));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 10000; ++k) {
        const Phasor i1{u(rng), u(rng)}, i2{u(rng), u(rng)};
        const auto m = seq::phase_current_magnitudes(i1, i2);
        const PhaseTriple p = seq::to_phase(SequenceTriple{0.0, i1, i2});
        REQUIRE(std::abs(m[0] - std::abs(p.a)) < 1e-12);
        REQUIRE(std::abs(m[1] - std::abs(p.b)) < 1e-12);
        REQUIRE(std::abs(m[2] - std::abs(p.c)) < 1e-12);
    }
}

TEST_CASE("sequence impedance expansion", "[seq]") {
    const Phasor z1{0.02, 0.08}, z0{0.06, 0.24};
    const Mat3 z = phase_matrix_from_sequence_impedance(z1, z0);
    const Mat3 zs = seq::analysis() * z * seq::synthesis();
    CHECK(std::abs(zs(0, 0) - z0) < 1e-12);
    CHECK(std::abs(zs(1, 1) - z1) < 1e-12);
    CHECK(std::abs(zs(2, 2) - z1) < 1e-12);
    CHECK(std::abs(zs(0, 1)) < 1e-12);
}

TEST_CASE("per-unit conversions are inverse pairs", "[netmodel]") {
    PerUnitBase b{12.5};
    const double kv = 24.9;
    const Phasor z{3.1, -7.4}, v{14.2, 1.3}, i{0.21, -0.07}, s{0.7, 0.2};
    CHECK(std::abs(b.z_to_ohm(b.z_to_pu(z, kv), kv) - z) < 1e-12 * std::abs(z));
    CHECK(std::abs(b.v_to_kv(b.v_to_pu(v, kv), kv) - v) < 1e-12 * std::abs(v));
    CHECK(std::abs(b.i_to_ka(b.i_to_pu(i, kv), kv) - i) < 1e-12 * std::abs(i));
    CHECK(std::abs(b.s_phase_to_mva(b.s_phase_to_pu(s)) - s) < 1e-12 * std::abs(s));
}
