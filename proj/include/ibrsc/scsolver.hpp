#pragma once

// Iterative steady-state short-circuit solver. The faulted linear network is
// factorized once; each outer iteration updates every IBR (Jacobi) from the
// previous network solution and re-solves with the new injections until the
// IBR terminal sequence voltages settle.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ibrsc/errors.hpp"
#include "ibrsc/fault.hpp"
#include "ibrsc/frt.hpp"
#include "ibrsc/linearize.hpp"
#include "ibrsc/mana.hpp"

namespace ibrsc {

struct ScOptions {
    double tol = 1e-6;
    int max_iter = 20;
    PfOptions pf;
};

/// Defaults honour IBRSC_SC_TOL and IBRSC_PF_TOL.
ScOptions default_sc_options();

struct IbrIterate {
    int iter = 0;
    std::string ibr;
    double dv1 = 0.0;  // |V1(n) - V1(n-1)| at the LV terminal
    double dv2 = 0.0;
};

struct BranchCurrent {
    std::string id;
    Vec3 i_from = Vec3::Zero();  // phase currents entering at the from end
    Vec3 i_to = Vec3::Zero();
};

struct IbrResult {
    IbrOperatingPoint op;
    double scale = 1.0;
    Vec3 i_abc = Vec3::Zero();     // converter-side phase currents, unit base
    Vec3 i_abc_lv = Vec3::Zero();  // LV terminal phase currents, unit base
    Phasor dv1_lv, dv2_lv;         // change of LV sequence voltages from pre-fault
};

struct ScResult {
    FaultSpec fault;
    bool converged = false;
    int iterations = 0;
    double damping = 1.0;
    std::string message;
    std::vector<std::pair<std::string, Vec3>> bus_voltages;
    std::vector<BranchCurrent> branch_currents;
    Vec3 fault_current = Vec3::Zero();
    std::vector<IbrResult> ibrs;
    std::vector<std::vector<IbrOperatingPoint>> trajectory;  // per iteration, per IBR
    std::vector<IbrIterate> trace;
    double kcl_residual = 0.0;
    int pf_iterations = 0;

    Vec3 bus_voltage(const std::string& bus) const;
    const IbrResult& ibr(const std::string& id) const;
};

/// Thrown by solve_sc when the outer loop does not settle; carries the result.
class ScNonConvergence : public NonConvergence {
  public:
    ScNonConvergence(const std::string& what, ConvergenceDiagnostics d, std::shared_ptr<const ScResult> r)
        : NonConvergence(what, std::move(d)), result_(std::move(r)) {}
    const ScResult& result() const { return *result_; }

  private:
    std::shared_ptr<const ScResult> result_;
};

/// Adds the fault stamp to Y_n. A non-finite z_fault adds nothing.
/// Throws InputError when the bus or one of the fault phases is missing.
LinearizedNetwork apply_fault(const LinearizedNetwork& lin, const FaultSpec& fault);
/// Copy without any fault stamps.
LinearizedNetwork remove_faults(const LinearizedNetwork& lin);

/// Power flow and linearization shared by many fault scenarios.
struct ScContext {
    NetworkModel net;
    PfSolution pf;
    LinearizedNetwork lin;
};
ScContext prepare_sc(const NetworkModel& net, const PfOptions& pf = default_pf_options());

ScResult solve_sc(const ScContext& ctx, const FaultSpec& fault, const ScOptions& opts = default_sc_options());
ScResult solve_sc(const NetworkModel& net, const FaultSpec& fault, const ScOptions& opts = default_sc_options());

}  // namespace ibrsc
