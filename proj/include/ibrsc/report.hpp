#pragma once

// Human tables, machine JSON and convergence traces. Output is byte-identical
// for identical input.

#include <string>
#include <vector>

#include "ibrsc/mana.hpp"
#include "ibrsc/scsolver.hpp"

namespace ibrsc {

enum class ReportFormat { Table, Machine, Trace };

ReportFormat parse_report_format(const std::string& s);

/// Table: per-IBR phase and sequence currents (magnitude in pu and A, angle in
/// degrees) and the fault current. Machine: full JSON document. Trace: CSV with
/// one row per iteration per IBR (iter, ibr, |dV1|, |dV2|).
std::string emit_report(const NetworkModel& net, const ScResult& r, ReportFormat f);

/// Table: bus voltages; machine: JSON with voltages, IBR currents and
/// regulator taps; trace: Newton residual history.
std::string emit_report(const NetworkModel& net, const PfSolution& pf, ReportFormat f);

/// Batch output over several results. Table: one summary line per scenario;
/// machine: JSON array of the single-result documents; trace: concatenated
/// CSV with a leading scenario column.
std::string emit_sweep_report(const NetworkModel& net, const std::vector<ScResult>& rs, ReportFormat f);

}  // namespace ibrsc
