#include "ibrsc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ibrsc/errors.hpp"
#include "ibrsc/seq.hpp"

namespace ibrsc {

namespace {

using ojson = nlohmann::ordered_json;

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

/// %.17g keeps every bit of a double.
std::string num(double v) { return fmt("%.17g", v); }

ojson cj(Phasor z) { return ojson::array({z.real(), z.imag()}); }
ojson vj(const Vec3& v) { return ojson::array({cj(v(0)), cj(v(1)), cj(v(2))}); }

const char* mode_text(IbrMode m) { return m == IbrMode::GFL ? "GFL" : "GFM"; }

double bus_kv(const NetworkModel& net, const std::string& bus) {
    const int i = net.bus_index(bus);
    return i < 0 ? 1.0 : net.buses[static_cast<std::size_t>(i)].base_kv;
}

/// "name  mag_pu  mag_A  angle" row.
std::string current_row(const std::string& name, Phasor i, double amp_base) {
    const double deg = std::abs(i) < 1e-12 ? 0.0 : rad_to_deg(std::arg(i));
    return fmt("  %-6s %12.3f %14.3f %10.2f\n", name.c_str(), std::abs(i), std::abs(i) * amp_base, deg);
}

std::string voltage_row(const std::string& name, Phasor v) {
    const double deg = std::abs(v) < 1e-12 ? 0.0 : rad_to_deg(std::arg(v));
    return fmt("  %-6s %12.5f %10.2f\n", name.c_str(), std::abs(v), deg);
}

ojson fault_json(const FaultSpec& f) {
    auto z = [](Phasor v) { return std::isfinite(std::abs(v)) ? cj(v) : ojson("inf"); };
    return {{"bus", f.bus}, {"kind", to_string(f.kind)}, {"z_fault", z(f.z_fault)}, {"z_ground", z(f.z_ground)}};
}

ojson ibr_json(const IbrResult& r) {
    const auto& op = r.op;
    ojson o{{"id", op.id},
            {"mode", mode_text(op.mode)},
            {"scale", r.scale},
            {"i_abc", vj(r.i_abc)},
            {"i_abc_lv", vj(r.i_abc_lv)},
            {"i1", cj(op.i1)},
            {"i2", cj(op.i2)},
            {"i1_lv", cj(op.i1_lv)},
            {"i2_lv", cj(op.i2_lv)},
            {"i2_support", cj(op.i2_support)},
            {"v0_lv", cj(op.v0_lv)},
            {"v1_lv", cj(op.v1_lv)},
            {"v2_lv", cj(op.v2_lv)},
            {"dv1_lv", cj(r.dv1_lv)},
            {"dv2_lv", cj(r.dv2_lv)},
            {"q", op.q}};
    if (op.mode == IbrMode::GFL) {
        const auto& c = op.csm;
        o["limiter"] = {{"type", c.variant == CsmVariant::Improved ? "csm_improved" : "csm_conventional"},
                        {"active", c.active},
                        {"i1_p", c.i1_p},
                        {"i1_r", c.i1_r},
                        {"i2_r", c.i2_r},
                        {"i1_max", c.i1_max},
                        {"i2_max", c.i2_max},
                        {"delta_i1_rad", c.delta_i1},
                        {"delta_i2_rad", c.delta_i2}};
    } else {
        const auto& v = op.vic;
        o["limiter"] = {{"type", "vic"},
                        {"active", v.active},
                        {"infeasible", v.infeasible},
                        {"r_vi", v.r_vi},
                        {"x_vi", v.x_vi},
                        {"phi", v.phi},
                        {"sigma", v.sigma},
                        {"i_th", v.i_th},
                        {"v_drop", v.v_drop},
                        {"i1_max", v.i1_max},
                        {"i2_max", v.i2_max},
                        {"i1_unconstrained", v.i1_unconstrained},
                        {"e1", cj(op.e1)}};
    }
    return o;
}

ojson sc_json(const ScResult& r) {
    ojson doc;
    doc["fault"] = fault_json(r.fault);
    doc["converged"] = r.converged;
    doc["iterations"] = r.iterations;
    doc["damping"] = r.damping;
    doc["message"] = r.message;
    doc["pf_iterations"] = r.pf_iterations;
    doc["kcl_residual"] = r.kcl_residual;
    doc["fault_current"] = vj(r.fault_current);
    ojson buses = ojson::object();
    for (const auto& [id, v] : r.bus_voltages) buses[id] = vj(v);
    doc["bus_voltages"] = buses;
    ojson branches = ojson::array();
    for (const auto& b : r.branch_currents) branches.push_back({{"id", b.id}, {"i_from", vj(b.i_from)}, {"i_to", vj(b.i_to)}});
    doc["branch_currents"] = branches;
    ojson ibrs = ojson::array();
    for (const auto& i : r.ibrs) ibrs.push_back(ibr_json(i));
    doc["ibrs"] = ibrs;
    ojson trace = ojson::array();
    for (const auto& t : r.trace) trace.push_back({{"iter", t.iter}, {"ibr", t.ibr}, {"dv1", t.dv1}, {"dv2", t.dv2}});
    doc["trace"] = trace;
    return doc;
}

std::string trace_rows(const ScResult& r, const std::string& prefix) {
    std::string out;
    for (const auto& t : r.trace) out += prefix + std::to_string(t.iter) + "," + t.ibr + "," + num(t.dv1) + "," + num(t.dv2) + "\n";
    return out;
}

std::string sc_table(const NetworkModel& net, const ScResult& r) {
    std::ostringstream os;
    os << "Short circuit: " << to_string(r.fault.kind) << " at bus " << r.fault.bus;
    if (std::isfinite(std::abs(r.fault.z_fault)))
        os << fmt(", z_fault = %.6g%+.6gj pu", r.fault.z_fault.real(), r.fault.z_fault.imag());
    os << "\n";
    os << (r.converged ? "converged" : "NOT converged") << " in " << r.iterations << " iteration(s)";
    if (!r.message.empty()) os << " (" << r.message << ")";
    os << "\n\n";
    const double fault_amp = net.base.i_base_ka(bus_kv(net, r.fault.bus)) * 1000.0;
    os << "Fault current\n" << fmt("  %-6s %12s %14s %10s\n", "", "Mag (pu)", "Mag (A)", "Angle (deg)");
    for (int p = 0; p < 3; ++p) os << current_row(std::string("i_") + static_cast<char>('a' + p), r.fault_current(p), fault_amp);
    for (const auto& i : r.ibrs) {
        const double amp = i.scale * net.base.i_base_ka(bus_kv(net, net.ibr(i.op.id).bus)) * 1000.0;
        os << "\nIBR " << i.op.id << " (" << mode_text(i.op.mode) << ", bus " << net.ibr(i.op.id).bus << ")";
        if (i.op.mode == IbrMode::GFL) os << (i.op.csm.active ? ", limiter active" : ", limiter idle");
        else os << (i.op.vic.active ? fmt(", VIC active r_vi = %.5f", i.op.vic.r_vi) : std::string(", VIC idle"));
        os << "\n" << fmt("  %-6s %12s %14s %10s\n", "", "Mag (pu)", "Mag (A)", "Angle (deg)");
        for (int p = 0; p < 3; ++p) os << current_row(std::string("i_") + static_cast<char>('a' + p), i.i_abc(p), amp);
        os << current_row("i_1", i.op.i1, amp) << current_row("i_2", i.op.i2, amp);
        os << fmt("  %-6s %12s %10s\n", "", "Mag (pu)", "Angle (deg)");
        os << voltage_row("v_1", i.op.v1_lv) << voltage_row("v_2", i.op.v2_lv);
    }
    return os.str();
}

std::string pf_table(const NetworkModel& net, const PfSolution& pf) {
    std::ostringstream os;
    os << "Power flow: " << pf.iterations << " iteration(s), residual " << fmt("%.3e", pf.residual_norm) << "\n\n";
    os << fmt("  %-10s %-6s %12s %10s\n", "Bus", "Phase", "|V| (pu)", "Angle (deg)");
    for (const auto& b : net.buses) {
        const Vec3 v = pf.bus_voltage(b.id);
        for (int p = 0; p < 3; ++p) {
            if (!b.phases.has(p)) continue;
            os << fmt("  %-10s %-6c %12.6f %10.3f\n", b.id.c_str(), phase_letter(p), std::abs(v(p)), rad_to_deg(std::arg(v(p))));
        }
    }
    if (!net.ibrs.empty()) {
        os << "\n" << fmt("  %-10s %-6s %12s %12s\n", "IBR", "Mode", "P (pu)", "Q (pu)");
        for (const auto& u : net.ibrs) {
            const Vec3 v = pf.bus_voltage(u.bus);
            const Vec3 i = pf.ibr_current(u.id);
            Phasor s{};
            for (int p = 0; p < 3; ++p) s += v(p) * std::conj(i(p));
            s /= 3.0;  // per-phase sum back to three-phase pu
            os << fmt("  %-10s %-6s %12.6f %12.6f\n", u.id.c_str(), mode_text(u.mode), s.real(), s.imag());
        }
    }
    return os.str();
}

ojson pf_json(const NetworkModel& net, const PfSolution& pf) {
    ojson doc;
    doc["iterations"] = pf.iterations;
    doc["residual_norm"] = pf.residual_norm;
    ojson buses = ojson::object();
    for (const auto& b : net.buses) buses[b.id] = vj(pf.bus_voltage(b.id));
    doc["bus_voltages"] = buses;
    ojson ibrs = ojson::object();
    for (const auto& u : net.ibrs) ibrs[u.id] = vj(pf.ibr_current(u.id));
    doc["ibr_currents"] = ibrs;
    ojson gens = ojson::object();
    for (const auto& g : net.generators) gens[g.id] = cj(pf.emf(g.id));
    doc["generator_emf"] = gens;
    ojson regs = ojson::object();
    for (const auto& r : net.regulators) regs[r.id] = {pf.tap(r.id, 0), pf.tap(r.id, 1), pf.tap(r.id, 2)};
    doc["regulator_taps"] = regs;
    doc["history"] = pf.history;
    return doc;
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
    if (s == "table") return ReportFormat::Table;
    if (s == "machine" || s == "json") return ReportFormat::Machine;
    if (s == "trace" || s == "csv") return ReportFormat::Trace;
    throw InputError("unknown report format '" + s + "'");
}

std::string emit_report(const NetworkModel& net, const ScResult& r, ReportFormat f) {
    switch (f) {
        case ReportFormat::Table: return sc_table(net, r);
        case ReportFormat::Machine: return sc_json(r).dump(2) + "\n";
        case ReportFormat::Trace: return "iter,ibr,dv1,dv2\n" + trace_rows(r, "");
    }
    return {};
}

std::string emit_report(const NetworkModel& net, const PfSolution& pf, ReportFormat f) {
    switch (f) {
        case ReportFormat::Table: return pf_table(net, pf);
        case ReportFormat::Machine: return pf_json(net, pf).dump(2) + "\n";
        case ReportFormat::Trace: {
            std::string out = "iter,residual\n";
            for (std::size_t i = 0; i < pf.history.size(); ++i) out += std::to_string(i) + "," + num(pf.history[i]) + "\n";
            return out;
        }
    }
    return {};
}

std::string emit_sweep_report(const NetworkModel& net, const std::vector<ScResult>& rs, ReportFormat f) {
    switch (f) {
        case ReportFormat::Table: {
            std::string out = fmt("  %-5s %-10s %-5s %-20s %-5s %5s %12s %12s\n", "#", "Bus", "Kind", "z_fault (pu)", "Conv",
                                  "Iter", "max|If| pu", "max|Iibr| pu");
            for (std::size_t k = 0; k < rs.size(); ++k) {
                const auto& r = rs[k];
                const std::string z = std::isfinite(std::abs(r.fault.z_fault))
                                          ? fmt("%.4g%+.4gj", r.fault.z_fault.real(), r.fault.z_fault.imag())
                                          : std::string("inf");
                double ibr_max = 0.0;
                for (const auto& i : r.ibrs) ibr_max = std::max(ibr_max, i.i_abc.cwiseAbs().maxCoeff());
                out += fmt("  %-5zu %-10s %-5s %-20s %-5s %5d %12.4f %12.4f\n", k, r.fault.bus.c_str(),
                           to_string(r.fault.kind).c_str(), z.c_str(), r.converged ? "yes" : "NO", r.iterations,
                           r.fault_current.cwiseAbs().maxCoeff(), ibr_max);
                if (!r.converged && !r.message.empty()) out += "        " + r.message + "\n";
            }
            (void)net;
            return out;
        }
        case ReportFormat::Machine: {
            ojson arr = ojson::array();
            for (const auto& r : rs) arr.push_back(sc_json(r));
            return arr.dump(2) + "\n";
        }
        case ReportFormat::Trace: {
            std::string out = "scenario,bus,kind,iter,ibr,dv1,dv2\n";
            for (std::size_t k = 0; k < rs.size(); ++k)
                out += trace_rows(rs[k], std::to_string(k) + "," + rs[k].fault.bus + "," + to_string(rs[k].fault.kind) + ",");
            return out;
        }
    }
    return {};
}

}  // namespace ibrsc
