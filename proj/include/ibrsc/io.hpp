#pragma once

// JSON network and scenario files.
//
// Complex numbers are written as [re, im]; on input {"mag": m, "deg": a} is
// also accepted. Impedances (and branch shunt admittances) are per-unit unless
// the file sets "impedance_unit": "ohm", in which case they are converted on
// the base of the bus they attach to. Serialization always writes per-unit
// with round-trip precision.

#include <filesystem>
#include <string>
#include <vector>

#include "ibrsc/mana.hpp"
#include "ibrsc/netmodel.hpp"
#include "ibrsc/sweep.hpp"

namespace ibrsc {

inline constexpr int kSchemaVersion = 1;

/// Parse and validate. Unknown fields, missing required fields and type
/// errors throw InputError naming the field path and its line.
NetworkModel parse_network_text(const std::string& text, const std::string& origin = "<string>");
NetworkModel parse_network(const std::filesystem::path& path);
std::string serialize_network(const NetworkModel& net);

struct OutputSelection {
    bool table = true;
    bool machine = true;
    bool trace = true;
};

struct ScenarioFile {
    PfOptions pf;
    ScOptions sc;
    std::vector<FaultSpec> faults;  // explicit list, solved before the sweep ranges
    SweepSpec sweep;                // empty buses: no sweep
    OutputSelection outputs;
};

ScenarioFile parse_scenario_text(const std::string& text, const std::string& origin = "<string>");
ScenarioFile parse_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioFile& s);
/// All fault specs of the scenario in run order.
std::vector<FaultSpec> scenario_faults(const ScenarioFile& s);
/// Throws InputError when a fault or sweep bus is not in the network.
void check_scenario(const ScenarioFile& s, const NetworkModel& net);

/// "0.01+0.1j" style text; plain reals allowed. "inf" means no fault stamp.
Phasor parse_complex_text(const std::string& s);

}  // namespace ibrsc
