#pragma once

// Modified augmented nodal analysis. Linear steady-state systems and the
// Newton-Raphson power-flow Jacobian share the real-split layout of IndexMap.
//
// KCL rows read  Y V + (currents leaving through elements) - (injections) = 0.
// PF residuals are f(x) = L x - c + g(x) with L, c constant and g the
// nonlinear element laws.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "ibrsc/errors.hpp"
#include "ibrsc/index_map.hpp"
#include "ibrsc/netmodel.hpp"
#include "ibrsc/seq.hpp"
#include "ibrsc/stamps.hpp"

namespace ibrsc {

struct LinearizedNetwork;

enum class SystemKind { SSLinear, PFJacobian };

struct ManaSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;  // A x = rhs (SS); -f(x) at the iterate (PF)
    IndexMap index;
    SystemKind kind = SystemKind::SSLinear;
};

IndexMap index_linear(const LinearizedNetwork& lin);
IndexMap index_pf(const NetworkModel& net);

/// Linear system of a linearized network. Throws AssemblyError naming any
/// island that has neither a source nor a shunt path.
ManaSystem assemble_ss(const LinearizedNetwork& lin);
/// Right-hand side only (sources and injections), for repeated solves.
Eigen::VectorXd assemble_ss_rhs(const LinearizedNetwork& lin, const IndexMap& index);
/// Nominal linear equivalent: constant-impedance loads at 1 pu, generators as
/// EMF sources, GFL units as setpoint injections, GFM units as v_ref sources.
ManaSystem assemble_ss(const NetworkModel& net);

/// Solve A x = rhs. Throws AssemblyError when numerically singular.
Eigen::VectorXd solve_linear(const ManaSystem& sys);
/// Complex view of a solution whose unknowns are all complex.
std::vector<Phasor> as_phasors(const IndexMap& index, const Eigen::VectorXd& x);

// ---------------------------------------------------------------- power flow

enum class StartMode { Flat, Warm };

struct PfOptions {
    double tol = 1e-8;
    int max_iter = 50;
    StartMode start = StartMode::Flat;
    std::optional<Eigen::VectorXd> warm;  // used with StartMode::Warm
    bool round_taps = true;
};

/// Tolerance defaults honour IBRSC_PF_TOL.
PfOptions default_pf_options();

struct PfSolution {
    IndexMap index;
    Eigen::VectorXd x;
    int iterations = 0;
    double residual_norm = 0.0;
    std::vector<double> history;

    Phasor value(Block b, const std::string& element, const std::string& label) const;
    Phasor voltage(const std::string& bus, int phase) const;
    /// Phase voltages of a bus; absent phases are 0.
    Vec3 bus_voltage(const std::string& bus) const;
    /// Injected LV terminal phase currents of an IBR (system pu).
    Vec3 ibr_current(const std::string& ibr) const;
    Phasor emf(const std::string& generator) const;
    double tap(const std::string& regulator, int phase) const;
};

/// Resolved per-unit IBR constants (system base).
struct IbrConstraintSet {
    std::string id;
    IbrMode mode = IbrMode::GFL;
    bool slack = false;  // GFM holding the angle reference of its island
    double p_r = 0.0;    // sum-over-phases units: 3 p_ref c
    double q_r = 0.0;
    double v_r = 1.0;
    Phasor k_neg;   // system pu
    Phasor k_zero;  // system pu
};

std::vector<IbrConstraintSet> ibr_constraints(const NetworkModel& net);

/// Effective IBR admittances on the unit's own base.
Phasor ibr_k_neg(const IbrUnit& u);
Phasor ibr_k_zero(const IbrUnit& u);

/// Evaluates f(x) and J(x) of the power-flow equations.
class PfEquations {
  public:
    /// fixed_taps: per regulator, 3 taps held constant (tap rows become g - g_fix).
    explicit PfEquations(const NetworkModel& net, std::optional<std::vector<std::array<double, 3>>> fixed_taps = {});

    const IndexMap& index() const { return index_; }
    int size() const { return index_.size(); }

    Eigen::VectorXd residual(const Eigen::VectorXd& x) const;
    Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x) const;
    Eigen::VectorXd flat_start() const;

    /// Structural Jacobian entries of one IBR's constraint rows, split into
    /// columns of node voltages (C) and of the IBR's own currents (D).
    struct EntryCount {
        int c = 0;
        int d = 0;
    };
    struct IbrEntryCounts {
        EntryCount positive_pq;  // both rows of the positive-sequence pair (GFL P,Q)
        EntryCount positive_p;   // P row alone
        EntryCount v1_magnitude; // |V1| row (GFM)
        EntryCount negative;
        EntryCount zero;
    };
    IbrEntryCounts ibr_entry_counts(const std::string& ibr, const Eigen::VectorXd& x) const;

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    IndexMap index_;
};

Eigen::VectorXd residuals(const NetworkModel& net, const Eigen::VectorXd& x);
ManaSystem assemble_pf_jacobian(const NetworkModel& net, const Eigen::VectorXd& x);

/// Newton-Raphson power flow. Throws NonConvergence after max_iter.
PfSolution solve_pf(const NetworkModel& net, const PfOptions& opts = default_pf_options());

/// Complex power balance at a solution (sum-over-phases units): generation
/// from sources, generators and IBRs against load consumption and the power
/// absorbed by series elements and shunts.
struct PowerBalance {
    Phasor generation{};
    Phasor load{};
    Phasor losses{};
    double mismatch = 0.0;  // |generation - load - losses|
};
PowerBalance power_balance(const NetworkModel& net, const PfSolution& pf);

}  // namespace ibrsc
