#pragma once

// Linear steady-state network derived from a converged power flow. Branches,
// transformers and switches come from `base`; every other element of `base`
// (loads, sources, generators, regulators, IBRs) is ignored and represented by
// the substitute lists below.

#include <string>
#include <vector>

#include "ibrsc/fault.hpp"
#include "ibrsc/mana.hpp"
#include "ibrsc/netmodel.hpp"

namespace ibrsc {

enum class ShuntRole { Load, IbrFilter, IbrZero, Other };

struct ShuntElement {
    std::string id;
    std::string bus;
    Mat3 y = Mat3::Zero();  // phase admittance, absorbed current = y V
    ShuntRole role = ShuntRole::Other;
    std::string owner;
};

struct CurrentInjection {
    std::string id;
    std::string bus;
    Vec3 i = Vec3::Zero();  // injected phase currents, system pu
    std::string owner;
};

/// Positive-sequence voltage source E1 behind z_vi at a three-phase bus.
struct SequenceSource {
    std::string id;
    std::string bus;
    Phasor e1{1.0, 0.0};
    Phasor z_vi{0.0, 0.0};
    std::string owner;
};

struct FixedRegulator {
    Regulator reg;
    std::array<double, 3> tap{1.0, 1.0, 1.0};
};

struct FaultStamp {
    FaultSpec spec;
    Mat3 y = Mat3::Zero();
};

/// Pre-fault state of one IBR. Currents and impedances are on the unit's own
/// base; voltages are shared. Converter-side currents include the filter.
struct IbrLinearState {
    std::string id;
    std::string bus;
    IbrMode mode = IbrMode::GFL;
    double scale = 1.0;  // s_rated / s_base
    bool has_filter = false;
    Phasor z_filter{0.0, 0.0};
    Phasor k_neg{0.0, 0.0};
    Phasor k_zero{0.0, 0.0};
    Phasor v0_pre, v1_pre, v2_pre;
    Phasor i1_lv_pre, i2_lv_pre;  // injected at the LV terminal
    Phasor i1_pre, i2_pre;        // converter side
    Phasor e1_pre;                // GFM internal EMF
    double q_ref = 0.0;
    double v_ref = 1.0;
};

struct LinearizedNetwork {
    NetworkModel base;
    std::vector<SourceIdeal> sources;
    std::vector<SequenceSource> seq_sources;
    std::vector<FixedRegulator> regulators;
    std::vector<ShuntElement> shunts;
    std::vector<CurrentInjection> injections;
    std::vector<IbrLinearState> ibrs;
    std::vector<FaultStamp> faults;

    const IbrLinearState& ibr(const std::string& id) const;
};

/// Nominal linear equivalent of a network (no power flow needed).
LinearizedNetwork nominal_linear_network(const NetworkModel& net);

/// Substitute elements by their equivalents at the power-flow point. GFL units
/// become converter-current injections, GFM units an E1 source plus an I2
/// injection; every IBR gets a sequence shunt A diag(-k_zero, y_f, y_f) A^-1.
/// Throws InputError for a zero voltage at a constant-power load phase.
LinearizedNetwork linearize(const NetworkModel& net, const PfSolution& pf);

/// Unfaulted SS node voltages as a bus -> phase voltage map helper.
Vec3 ss_bus_voltage(const LinearizedNetwork& lin, const IndexMap& index, const Eigen::VectorXd& x, const std::string& bus);

struct Thevenin {
    Phasor z_eq;  // system pu
    Phasor v_eq;
};

/// Positive-sequence Thevenin equivalent at an IBR's LV bus seen by its
/// converter: the unit's own filter, E1 source and injections are removed
/// (its zero-sequence shunt stays). z_eq is probed with all sources and other
/// injections zeroed; v_eq with everything else active and own I1,LV = 0.
/// `own_i2_lv` is the unit's own negative-sequence LV injection (system pu)
/// applied during the v_eq probe.
Thevenin thevenin_at(const LinearizedNetwork& lin, const std::string& ibr, Phasor own_i2_lv = {});

}  // namespace ibrsc
