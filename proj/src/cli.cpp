#include "ibrsc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "ibrsc/errors.hpp"
#include "ibrsc/io.hpp"
#include "ibrsc/report.hpp"
#include "ibrsc/scsolver.hpp"
#include "ibrsc/sweep.hpp"
#include "ibrsc/validate.hpp"

namespace ibrsc {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << text;
}

struct Args {
    std::string network, scenario, bus, kind = "ABCG", zf = "0", zg = "0";
    std::string out, trace, out_dir = "sweep_out", format = "table";
    bool serial = false;
};

int cmd_validate(const Args& a, std::ostream& out, std::ostream& err) {
    const NetworkModel net = parse_network(a.network);
    const ValidationReport rep = validate(net);
    for (const auto& i : rep.issues)
        if (i.severity == Severity::Warning) err << "warning: " << i.subject << ": " << i.message << "\n";
    out << "OK\n";
    return 0;
}

int cmd_pf(const Args& a, std::ostream& out, std::ostream&) {
    const NetworkModel net = parse_network(a.network);
    const PfSolution pf = solve_pf(net, default_pf_options());
    out << emit_report(net, pf, parse_report_format(a.format));
    if (!a.out.empty()) write_file(a.out, emit_report(net, pf, ReportFormat::Machine));
    return 0;
}

int cmd_sc(const Args& a, std::ostream& out, std::ostream& err) {
    const NetworkModel net = parse_network(a.network);
    const FaultSpec f{a.bus, parse_fault_kind(a.kind), parse_complex_text(a.zf), parse_complex_text(a.zg)};
    const ScOptions opts = default_sc_options();
    ScResult r;
    int code = 0;
    try {
        const ScContext ctx = prepare_sc(net, opts.pf);
        apply_fault(ctx.lin, f);  // surfaces bus/phase errors as input errors
        r = solve_sc(ctx, f, opts);
    } catch (const ScNonConvergence& e) {
        r = e.result();
        err << "error: " << e.what() << " (largest change at " << e.diagnostics().worst_row << ", "
            << e.diagnostics().final_norm << " pu)\n";
        code = 1;
    }
    out << emit_report(net, r, parse_report_format(a.format));
    if (!a.out.empty()) write_file(a.out, emit_report(net, r, ReportFormat::Machine));
    if (!a.trace.empty()) write_file(a.trace, emit_report(net, r, ReportFormat::Trace));
    return code;
}

int cmd_sweep(const Args& a, std::ostream& out, std::ostream& err) {
    const NetworkModel net = parse_network(a.network);
    const ScenarioFile sc = parse_scenario(a.scenario);
    check_scenario(sc, net);
    ScOptions opts = sc.sc;
    opts.pf = sc.pf;
    const ScContext ctx = prepare_sc(net, opts.pf);

    std::vector<ScResult> results;
    auto run = [&](const SweepSpec& s) {
        auto rs = a.serial ? sweep_serial(ctx, s, opts) : sweep(ctx, s, opts);
        results.insert(results.end(), std::make_move_iterator(rs.begin()), std::make_move_iterator(rs.end()));
    };
    for (const auto& f : sc.faults) run({{f.bus}, {f.kind}, {f.z_fault}, f.z_ground});
    if (!sc.sweep.buses.empty()) run(sc.sweep);

    const fs::path dir = a.out_dir;
    if (sc.outputs.table) write_file(dir / "summary.txt", emit_sweep_report(net, results, ReportFormat::Table));
    if (sc.outputs.machine) write_file(dir / "results.json", emit_sweep_report(net, results, ReportFormat::Machine));
    if (sc.outputs.trace) write_file(dir / "trace.csv", emit_sweep_report(net, results, ReportFormat::Trace));
    out << emit_sweep_report(net, results, ReportFormat::Table);

    int failed = 0;
    for (const auto& r : results)
        if (!r.converged) ++failed;
    if (failed > 0) {
        err << "error: " << failed << " of " << results.size() << " scenarios did not converge\n";
        return 1;
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steady-state short-circuit analysis with inverter-based resources"};
    app.require_subcommand(1);
    Args a;

    auto* v = app.add_subcommand("validate", "check a network file");
    v->add_option("network", a.network, "network file")->required();

    auto* pf = app.add_subcommand("pf", "power flow");
    pf->add_option("network", a.network, "network file")->required();
    pf->add_option("--out", a.out, "write machine-readable results here");
    pf->add_option("--format", a.format, "table, machine or trace");

    auto* sc = app.add_subcommand("sc", "single short circuit");
    sc->add_option("network", a.network, "network file")->required();
    sc->add_option("--bus", a.bus, "faulted bus")->required();
    sc->add_option("--kind", a.kind, "AG, BG, CG, AB, BC, CA, ABG, BCG, CAG, ABC or ABCG");
    sc->add_option("--zf", a.zf, "fault impedance in pu, e.g. 0.01+0.05j or inf");
    sc->add_option("--zg", a.zg, "ground impedance in pu");
    sc->add_option("--out", a.out, "write machine-readable results here");
    sc->add_option("--trace", a.trace, "write the convergence trace (CSV) here");
    sc->add_option("--format", a.format, "table, machine or trace");

    auto* sw = app.add_subcommand("sweep", "batch of short circuits");
    sw->add_option("network", a.network, "network file")->required();
    sw->add_option("scenario", a.scenario, "scenario file")->required();
    sw->add_option("--out-dir", a.out_dir, "directory for summary.txt, results.json and trace.csv");
    sw->add_flag("--serial", a.serial, "disable OpenMP across scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*v) return cmd_validate(a, out, err);
        if (*pf) return cmd_pf(a, out, err);
        if (*sc) return cmd_sc(a, out, err);
        if (*sw) return cmd_sweep(a, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergence& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const AssemblyError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace ibrsc
