#pragma once

// Batch short-circuit runs over buses x kinds x fault impedances.

#include <complex>
#include <string>
#include <vector>

#include "ibrsc/scsolver.hpp"

namespace ibrsc {

struct SweepSpec {
    std::vector<std::string> buses;
    std::vector<FaultKind> kinds;
    std::vector<Phasor> z_faults{Phasor(0.0, 0.0)};
    Phasor z_ground{0.0, 0.0};
};

/// Scenarios in deterministic order: bus-major, then kind, then impedance.
std::vector<FaultSpec> sweep_scenarios(const SweepSpec& spec);

/// Solves every scenario against one shared power flow. Failures are recorded
/// in the result (converged = false, message set) and never thrown. Runs the
/// scenarios in parallel with OpenMP; output order matches sweep_scenarios.
std::vector<ScResult> sweep(const ScContext& ctx, const SweepSpec& spec, const ScOptions& opts = default_sc_options());
std::vector<ScResult> sweep(const NetworkModel& net, const SweepSpec& spec, const ScOptions& opts = default_sc_options());

/// Single-threaded reference with identical output.
std::vector<ScResult> sweep_serial(const ScContext& ctx, const SweepSpec& spec,
                                   const ScOptions& opts = default_sc_options());

}  // namespace ibrsc
