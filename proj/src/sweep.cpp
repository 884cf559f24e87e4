#include "ibrsc/sweep.hpp"


namespace ibrsc {

std::vector<FaultSpec> sweep_scenarios(const SweepSpec& spec) {
    std::vector<FaultSpec> out;
    out.reserve(spec.buses.size() * spec.kinds.size() * spec.z_faults.size());
    for (const auto& bus : spec.buses)
        for (FaultKind kind : spec.kinds)
            for (Phasor z : spec.z_faults) out.push_back({bus, kind, z, spec.z_ground});
    return out;
}

namespace {

ScResult run_one(const ScContext& ctx, const FaultSpec& f, const ScOptions& opts) {
    try {
        return solve_sc(ctx, f, opts);
    } catch (const ScNonConvergence& e) {
        return e.result();
    } catch (const std::exception& e) {
        ScResult r;
        r.fault = f;
        r.converged = false;
        r.message = e.what();
        return r;
    }
}

}  // namespace

std::vector<ScResult> sweep_serial(const ScContext& ctx, const SweepSpec& spec, const ScOptions& opts) {
    const auto scenarios = sweep_scenarios(spec);
    std::vector<ScResult> out;
    out.reserve(scenarios.size());
    for (const auto& f : scenarios) out.push_back(run_one(ctx, f, opts));
    return out;
}

std::vector<ScResult> sweep(const ScContext& ctx, const SweepSpec& spec, const ScOptions& opts) {
    const auto scenarios = sweep_scenarios(spec);
    std::vector<ScResult> out(scenarios.size());
    const auto n = static_cast<long>(scenarios.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = run_one(ctx, scenarios[static_cast<std::size_t>(i)], opts);
    return out;
}

std::vector<ScResult> sweep(const NetworkModel& net, const SweepSpec& spec, const ScOptions& opts) {
    const ScContext ctx = prepare_sc(net, opts.pf);
    return sweep(ctx, spec, opts);
}

}  // namespace ibrsc
