#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "fixtures.hpp"
#include "ibrsc/errors.hpp"
#include "ibrsc/io.hpp"
#include "ibrsc/report.hpp"
#include "ibrsc/scsolver.hpp"

using namespace ibrsc;

namespace {

std::string one_bus(const std::string& extra_bus_field = "", int version = 1) {
    return R"({
  "schema_version": )" + std::to_string(version) + R"(,
  "s_base_mva": 10,
  "buses": [
    {"id": "1", "phases": "ABC", "base_kv": 12.47)" + extra_bus_field + R"(}
  ],
  "sources": [
    {"id": "S", "bus": "1", "e": [1.0, 0.0], "z_int": {"z1": [0.01, 0.1], "z0": [0.02, 0.3]}}
  ]
})";
}

std::string two_bus(const std::string& unit, const std::string& z1, const std::string& z0) {
    return R"({
  "schema_version": 1,
  "s_base_mva": 10,
  "impedance_unit": ")" + unit + R"(",
  "buses": [
    {"id": "1", "phases": "ABC", "base_kv": 24.9},
    {"id": "2", "phases": "ABC", "base_kv": 24.9}
  ],
  "branches": [
    {"id": "L", "from": "1", "to": "2", "phases": "ABC", "z": {"z1": )" + z1 + R"(, "z0": )" + z0 + R"(}}
  ],
  "sources": [
    {"id": "S", "bus": "1", "e": [1.0, 0.0], "z_int": 0.001}
  ]
})";
}

std::string input_error(const std::string& text) {
    try {
        parse_network_text(text, "net.json");
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal network", "[io]") {
    const NetworkModel n = parse_network_text(one_bus());
    CHECK(n.buses.size() == 1);
    CHECK(n.sources.size() == 1);
    CHECK(n.base.s_base == 10.0);
}

TEST_CASE("corpus round trip", "[io]") {
    for (const auto& name : fixtures::corpus_names()) {
        INFO(name);
        const NetworkModel a = fixtures::load(name);
        const std::string text = serialize_network(a);
        const NetworkModel b = parse_network_text(text);
        CHECK(serialize_network(b) == text);
        for (std::size_t k = 0; k < a.branches.size(); ++k) CHECK(a.branches[k].z_abc == b.branches[k].z_abc);
        for (std::size_t k = 0; k < a.ibrs.size(); ++k) {
            CHECK(a.ibrs[k].p_ref == b.ibrs[k].p_ref);
            CHECK(a.ibrs[k].z_filter == b.ibrs[k].z_filter);
        }
    }
}

TEST_CASE("ohm impedances convert on the bus base", "[io]") {
    const double zb = 24.9 * 24.9 / 10.0;
    const Phasor z1{0.02, 0.08}, z0{0.06, 0.24};
    auto js = [](Phasor z) { return "[" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + "]"; };
    auto precise = [](Phasor z) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", z.real(), z.imag());
        return std::string(buf);
    };
    const NetworkModel pu = parse_network_text(two_bus("pu", js(z1), js(z0)));
    const NetworkModel ohm = parse_network_text(two_bus("ohm", precise(z1 * zb), precise(z0 * zb)));
    CHECK((pu.branches[0].z_abc - ohm.branches[0].z_abc).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("located input errors", "[io]") {
    const std::string unknown = input_error(one_bus(", \"colour\": \"red\""));
    CHECK(unknown.find("colour") != std::string::npos);
    CHECK(unknown.find("net.json:5") != std::string::npos);

    CHECK(input_error(one_bus("", 7)).find("schema_version") != std::string::npos);
    CHECK(input_error("{\"schema_version\": 1,").find("net.json") != std::string::npos);
    CHECK_THROWS_AS(parse_network(fixtures::corpus("does_not_exist")), InputError);

    std::string bad = one_bus();
    bad.replace(bad.find("\"bus\": \"1\""), 10, "\"bus\": \"9\"");
    CHECK(input_error(bad).find("9") != std::string::npos);
}

TEST_CASE("complex number forms", "[io]") {
    CHECK(parse_complex_text("0.01+0.05j") == Phasor(0.01, 0.05));
    CHECK(parse_complex_text("0.2") == Phasor(0.2, 0.0));
    CHECK(std::isinf(parse_complex_text("inf").real()));
    CHECK_THROWS_AS(parse_complex_text("zero"), InputError);

    std::string polar = one_bus();
    polar.replace(polar.find("\"e\": [1.0, 0.0]"), 15, "\"e\": {\"mag\": 1.02, \"deg\": 30}");
    const NetworkModel n = parse_network_text(polar);
    CHECK(std::abs(n.sources[0].e_abc[0] - std::polar(1.02, kPi / 6)) < 1e-12);
}

TEST_CASE("scenario files", "[io]") {
    const ScenarioFile s = parse_scenario(fixtures::scenario("loop_sweep"));
    CHECK_FALSE(s.sweep.buses.empty());
    const std::string text = serialize_scenario(s);
    CHECK(serialize_scenario(parse_scenario_text(text)) == text);
    CHECK_NOTHROW(check_scenario(s, fixtures::load("transmission_loop")));
    CHECK_THROWS_AS(check_scenario(s, fixtures::load("two_bus")), InputError);

    const ScenarioFile t = parse_scenario(fixtures::scenario("loop_faults"));
    CHECK(scenario_faults(t).size() == 6);
}

TEST_CASE("reports are deterministic", "[report]") {
    const NetworkModel net = fixtures::load("gfm_radial");
    const ScResult r = solve_sc(net, {"ibr", FaultKind::ABCG, 0.0, 0.0});
    for (ReportFormat f : {ReportFormat::Table, ReportFormat::Machine, ReportFormat::Trace})
        CHECK(emit_report(net, r, f) == emit_report(net, solve_sc(net, {"ibr", FaultKind::ABCG, 0.0, 0.0}), f));

    const std::string table = emit_report(net, r, ReportFormat::Table);
    const auto at = table.find("  i_2 ");
    REQUIRE(at != std::string::npos);
    CHECK(table.substr(at, table.find('\n', at) - at).find("0.000") != std::string::npos);

    const std::string trace = emit_report(net, r, ReportFormat::Trace);
    CHECK(std::count(trace.begin(), trace.end(), '\n') ==
          1 + static_cast<long>(r.iterations * net.ibrs.size()));

    const auto doc = nlohmann::json::parse(emit_report(net, r, ReportFormat::Machine));
    CHECK(doc.contains("ibrs"));
}

TEST_CASE("machine output keeps full precision", "[report]") {
    const NetworkModel net = fixtures::load("three_bus_loads");
    const PfSolution pf = solve_pf(net);
    const std::string text = emit_report(net, pf, ReportFormat::Machine);
    CHECK(text == emit_report(net, pf, ReportFormat::Machine));
    const auto doc = nlohmann::json::parse(text);
    // Every voltage reads back to the solver's double exactly.
    const auto& v = doc.at("bus_voltages").at("3").at(0);
    const Phasor back{v.at(0).get<double>(), v.at(1).get<double>()};
    CHECK(back == pf.voltage("3", 0));
}
