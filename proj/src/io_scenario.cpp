#include <cmath>

#include "ibrsc/errors.hpp"
#include "ibrsc/io.hpp"
#include "json_reader.hpp"

namespace ibrsc {

using detail::complex_json;
using detail::LineIndex;
using detail::Node;
using detail::ojson;

namespace {

FaultKind kind_of(const Node& n) {
    try {
        return parse_fault_kind(n.string());
    } catch (const InputError& e) {
        n.fail(e.what());
    }
}

Phasor z_of(const Node& n) { return n.complex(); }

ojson z_json(Phasor z) { return std::isfinite(std::abs(z)) ? complex_json(z) : ojson("inf"); }

void read_pf(const Node& n, PfOptions& pf) {
    n.only({"tol", "max_iter", "start", "round_taps"});
    pf.tol = n.number_or("tol", pf.tol);
    pf.max_iter = n.integer_or("max_iter", pf.max_iter);
    const std::string start = n.string_or("start", "flat");
    if (start != "flat") n.at("start").fail("only \"flat\" start is supported in files");
    pf.round_taps = n.boolean_or("round_taps", pf.round_taps);
}

FaultSpec read_fault(const Node& n) {
    n.only({"bus", "kind", "z_fault", "z_ground"});
    FaultSpec f;
    f.bus = n.at("bus").string();
    f.kind = kind_of(n.at("kind"));
    if (n.has("z_fault")) f.z_fault = z_of(n.at("z_fault"));
    if (n.has("z_ground")) f.z_ground = z_of(n.at("z_ground"));
    return f;
}

void read_sweep(const Node& n, SweepSpec& s) {
    n.only({"buses", "kinds", "z_faults", "z_ground"});
    const Node buses = n.at("buses");
    for (std::size_t i = 0; i < buses.size(); ++i) s.buses.push_back(buses[i].string());
    if (const auto k = n.find("kinds")) {
        if (k->raw().is_string()) {
            if (k->string() != "all") k->fail("expected \"all\" or a list of fault kinds");
            s.kinds = all_fault_kinds();
        } else {
            for (std::size_t i = 0; i < k->size(); ++i) s.kinds.push_back(kind_of((*k)[i]));
        }
    } else {
        s.kinds = all_fault_kinds();
    }
    if (const auto z = n.find("z_faults")) {
        s.z_faults.clear();
        for (std::size_t i = 0; i < z->size(); ++i) s.z_faults.push_back(z_of((*z)[i]));
    }
    if (n.has("z_ground")) s.z_ground = z_of(n.at("z_ground"));
}

}  // namespace

Phasor parse_complex_text(const std::string& s) {
    if (s == "inf" || s == "Infinity") return {HUGE_VAL, 0.0};
    std::size_t pos = 0;
    double re = 0.0;
    try {
        re = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InputError("bad complex value '" + s + "'");
    }
    if (pos == s.size()) return {re, 0.0};
    const std::string rest = s.substr(pos);
    if (rest == "j" || rest == "i") return {0.0, re};
    std::size_t p2 = 0;
    double im = 0.0;
    try {
        im = std::stod(rest, &p2);
    } catch (const std::exception&) {
        throw InputError("bad complex value '" + s + "'");
    }
    if (p2 + 1 != rest.size() || (rest.back() != 'j' && rest.back() != 'i'))
        throw InputError("bad complex value '" + s + "'");
    return {re, im};
}

ScenarioFile parse_scenario_text(const std::string& text, const std::string& origin) {
    const auto doc = detail::parse_json(text, origin);
    const LineIndex lines(text);
    const Node root(doc, "", lines, origin);
    root.only({"schema_version", "pf", "sc", "faults", "sweep", "outputs"});
    const Node ver = root.at("schema_version");
    if (ver.integer() != kSchemaVersion) ver.fail("unsupported schema version " + std::to_string(ver.integer()));

    ScenarioFile s;
    s.pf = default_pf_options();
    s.sc = default_sc_options();
    if (const auto pf = root.find("pf")) read_pf(*pf, s.pf);
    s.sc.pf = s.pf;
    if (const auto sc = root.find("sc")) {
        sc->only({"tol", "max_iter"});
        s.sc.tol = sc->number_or("tol", s.sc.tol);
        s.sc.max_iter = sc->integer_or("max_iter", s.sc.max_iter);
    }
    if (const auto f = root.find("faults"))
        for (std::size_t i = 0; i < f->size(); ++i) s.faults.push_back(read_fault((*f)[i]));
    if (const auto sw = root.find("sweep")) read_sweep(*sw, s.sweep);
    if (const auto o = root.find("outputs")) {
        o->only({"table", "machine", "trace"});
        s.outputs.table = o->boolean_or("table", true);
        s.outputs.machine = o->boolean_or("machine", true);
        s.outputs.trace = o->boolean_or("trace", true);
    }
    return s;
}

ScenarioFile parse_scenario(const std::filesystem::path& path) {
    return parse_scenario_text(detail::read_file(path), path.string());
}

std::string serialize_scenario(const ScenarioFile& s) {
    ojson doc;
    doc["schema_version"] = kSchemaVersion;
    doc["pf"] = {{"tol", s.pf.tol}, {"max_iter", s.pf.max_iter}, {"start", "flat"}, {"round_taps", s.pf.round_taps}};
    doc["sc"] = {{"tol", s.sc.tol}, {"max_iter", s.sc.max_iter}};
    ojson faults = ojson::array();
    for (const auto& f : s.faults)
        faults.push_back({{"bus", f.bus}, {"kind", to_string(f.kind)}, {"z_fault", z_json(f.z_fault)},
                          {"z_ground", z_json(f.z_ground)}});
    doc["faults"] = faults;
    if (!s.sweep.buses.empty()) {
        ojson kinds = ojson::array();
        for (FaultKind k : s.sweep.kinds) kinds.push_back(to_string(k));
        ojson zs = ojson::array();
        for (Phasor z : s.sweep.z_faults) zs.push_back(z_json(z));
        doc["sweep"] = {{"buses", s.sweep.buses}, {"kinds", kinds}, {"z_faults", zs}, {"z_ground", z_json(s.sweep.z_ground)}};
    }
    doc["outputs"] = {{"table", s.outputs.table}, {"machine", s.outputs.machine}, {"trace", s.outputs.trace}};
    return doc.dump(2) + "\n";
}

std::vector<FaultSpec> scenario_faults(const ScenarioFile& s) {
    std::vector<FaultSpec> out = s.faults;
    if (!s.sweep.buses.empty()) {
        const auto more = sweep_scenarios(s.sweep);
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

void check_scenario(const ScenarioFile& s, const NetworkModel& net) {
    for (const auto& f : scenario_faults(s)) {
        const int b = net.bus_index(f.bus);
        if (b < 0) throw InputError("scenario references unknown bus '" + f.bus + "'");
        if (!net.buses[static_cast<std::size_t>(b)].phases.contains(fault_phases(f.kind)))
            throw InputError("scenario fault " + to_string(f.kind) + " at bus '" + f.bus + "' needs a missing phase");
    }
}

}  // namespace ibrsc
