#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "ibrsc/report.hpp"
#include "ibrsc/sweep.hpp"

using namespace ibrsc;

TEST_CASE("scenario order is bus, kind, impedance", "[sweep]") {
    const SweepSpec spec{{"B1", "B2"}, {FaultKind::AG, FaultKind::ABC}, {0.0, Phasor(0.1, 0.0)}, 0.0};
    const auto s = sweep_scenarios(spec);
    REQUIRE(s.size() == 8);
    CHECK(s[0].bus == "B1");
    CHECK(s[0].kind == FaultKind::AG);
    CHECK(s[1].z_fault == Phasor(0.1, 0.0));
    CHECK(s[2].kind == FaultKind::ABC);
    CHECK(s[4].bus == "B2");
}

TEST_CASE("parallel sweep equals the serial reference", "[sweep]") {
    const ScContext ctx = prepare_sc(fixtures::load("transmission_loop"));
    const SweepSpec spec{{"B2", "W1"}, all_fault_kinds(), {0.0}, 0.0};
    const auto par = sweep(ctx, spec);
    const auto ser = sweep_serial(ctx, spec);
    REQUIRE(par.size() == 22);
    REQUIRE(ser.size() == 22);
    const auto order = sweep_scenarios(spec);
    for (std::size_t k = 0; k < par.size(); ++k) {
        CHECK(par[k].fault.bus == order[k].bus);
        CHECK(par[k].fault.kind == order[k].kind);
        CHECK(par[k].iterations == ser[k].iterations);
        CHECK((par[k].fault_current.array() == ser[k].fault_current.array()).all());
    }
    CHECK(emit_sweep_report(ctx.net, par, ReportFormat::Machine) == emit_sweep_report(ctx.net, ser, ReportFormat::Machine));
    CHECK(emit_sweep_report(ctx.net, par, ReportFormat::Trace) == emit_sweep_report(ctx.net, ser, ReportFormat::Trace));
}

TEST_CASE("failures are recorded, not thrown", "[sweep]") {
    const NetworkModel net = fixtures::load("all_gfl_stressed");
    const SweepSpec spec{{"B3", "nowhere"}, {FaultKind::ABC}, {0.0}, 0.0};
    std::vector<ScResult> rs;
    REQUIRE_NOTHROW(rs = sweep(net, spec));
    REQUIRE(rs.size() == 2);
    CHECK_FALSE(rs[0].converged);
    CHECK(rs[0].iterations > 0);
    CHECK_FALSE(rs[1].converged);
    CHECK(rs[1].message.find("nowhere") != std::string::npos);
}
