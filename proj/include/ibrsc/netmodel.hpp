#pragma once

// Network data model. Everything stored here is per-unit:
//   voltages on the line-to-neutral base of each bus,
//   currents on s_base / (sqrt(3) kV_LL),
//   impedances on kV_LL^2 / s_base,
//   per-phase powers on s_base / 3 (a balanced 1 pu per-phase load draws s_base).
// IBR parameters (i_max, k_neg, k_zero, z_filter, p_ref, q_ref) are on the
// unit's own rating; the solvers rescale them by s_rated / s_base.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ibrsc/phasor.hpp"

namespace ibrsc {

struct Bus {
    std::string id;
    PhaseSet phases = PhaseSet::abc();
    double base_kv = 1.0;  // line-to-line
};

struct Branch {
    std::string id;
    std::string from, to;
    PhaseSet phases = PhaseSet::abc();
    Mat3 z_abc = Mat3::Zero();
    Mat3 y_shunt_abc = Mat3::Zero();  // total, split half at each end
};

enum class Winding { WyeGrounded, Wye, Delta };

struct Transformer {
    std::string id;
    std::string from, to;
    Winding from_conn = Winding::WyeGrounded;
    Winding to_conn = Winding::WyeGrounded;
    double tap = 1.0;
    Phasor z_leak{0.0, 0.05};
    std::optional<Phasor> z0_path;     // nullopt: zero sequence blocked
    std::optional<double> phase_shift;  // radians, from-side leads; default by vector group
};

/// Three single-phase, wye-connected step regulators with continuous taps
/// during the power flow, rounded to `step` afterwards.
struct Regulator {
    std::string id;
    std::string from, to;
    double v_target = 1.0;
    double step = 0.00625;
    double tap_min = 0.9;
    double tap_max = 1.1;
    std::array<double, 3> tap_init{1.0, 1.0, 1.0};
};

enum class LoadModel { ConstantPower, ConstantImpedance };

struct Load {
    std::string id;
    std::string bus;
    PhaseSet phases = PhaseSet::abc();
    std::array<Phasor, 3> s{};  // consumed per-phase P + jQ
    LoadModel model = LoadModel::ConstantPower;
};

struct SourceIdeal {
    std::string id;
    std::string bus;
    std::array<Phasor, 3> e_abc{};
    Mat3 z_int = Mat3::Zero();
};

/// Synchronous machine: balanced EMF behind a per-phase impedance with
/// three-phase terminal P and |E| held.
struct Generator {
    std::string id;
    std::string bus;
    double p_set = 0.0;  // three-phase, pu of s_base
    double e_set = 1.0;
    Phasor z_machine{0.0, 0.2};
};

struct Switch {
    std::string id;
    std::string from, to;
    PhaseSet phases = PhaseSet::abc();
    std::array<bool, 3> closed{true, true, true};
};

enum class IbrMode { GFL, GFM };
enum class CsmVariant { Improved, Conventional };

struct IbrUnit {
    std::string id;
    std::string bus;
    IbrMode mode = IbrMode::GFL;
    double s_rated = 1.0;  // MVA
    double i_max = 1.1;
    double p_ref = 0.0;  // three-phase, pu of s_rated
    double q_ref = 0.0;
    double v_ref = 1.0;  // GFM positive-sequence magnitude target
    double k_factor = 2.0;
    std::optional<Phasor> k_neg;
    std::optional<Phasor> k_zero;
    std::optional<Phasor> z_filter;  // shunt at the LV terminal
    double phi = 3.0;
    std::optional<double> kappa;  // default 0.1 * i1_max
    double k_v = 0.05;
    CsmVariant csm = CsmVariant::Improved;
};

struct PerUnitBase {
    double s_base = 1.0;  // MVA, three-phase

    double z_base(double kv_ll) const { return kv_ll * kv_ll / s_base; }
    double i_base_ka(double kv_ll) const { return s_base / (std::sqrt(3.0) * kv_ll); }
    double v_base_kv_ln(double kv_ll) const { return kv_ll / std::sqrt(3.0); }

    Phasor z_to_pu(Phasor ohm, double kv_ll) const { return ohm / z_base(kv_ll); }
    Phasor z_to_ohm(Phasor pu, double kv_ll) const { return pu * z_base(kv_ll); }
    Phasor v_to_pu(Phasor kv_ln, double kv_ll) const { return kv_ln / v_base_kv_ln(kv_ll); }
    Phasor v_to_kv(Phasor pu, double kv_ll) const { return pu * v_base_kv_ln(kv_ll); }
    Phasor i_to_pu(Phasor ka, double kv_ll) const { return ka / i_base_ka(kv_ll); }
    Phasor i_to_ka(Phasor pu, double kv_ll) const { return pu * i_base_ka(kv_ll); }
    /// Per-phase power: base is s_base / 3.
    Phasor s_phase_to_pu(Phasor mva) const { return mva / (s_base / 3.0); }
    Phasor s_phase_to_mva(Phasor pu) const { return pu * (s_base / 3.0); }
};

struct NetworkModel {
    std::string name;
    PerUnitBase base;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Transformer> transformers;
    std::vector<Regulator> regulators;
    std::vector<Load> loads;
    std::vector<SourceIdeal> sources;
    std::vector<Generator> generators;
    std::vector<Switch> switches;
    std::vector<IbrUnit> ibrs;

    /// Index of a bus by id, or -1.
    int bus_index(const std::string& id) const;
    const Bus& bus(const std::string& id) const;
    const IbrUnit& ibr(const std::string& id) const;
};

/// Default vector-group phase shift: 30 degrees when exactly one side is delta.
double transformer_phase_shift(const Transformer& t);
/// Zero-sequence shunt (pu) on each ungrounded transformer winding. It pins
/// the otherwise floating zero-sequence voltage of a delta-side bus.
inline constexpr double kFloatingNeutralAdmittance = 1e-6;

/// Current scale from IBR rating to system base.
inline double ibr_scale(const IbrUnit& u, const PerUnitBase& b) { return u.s_rated / b.s_base; }

/// Expand sequence impedances to a 3x3 phase matrix.
Mat3 phase_matrix_from_sequence_impedance(Phasor z1, Phasor z0);

/// Balanced positive-sequence EMF triple of magnitude |e| and angle of e.
std::array<Phasor, 3> balanced_set(Phasor e);

/// One entry per energized (bus, phase). Ground is not a node.
class NodeMap {
  public:
    explicit NodeMap(const NetworkModel& net);
    int node(int bus, int phase) const { return ids_[static_cast<std::size_t>(bus)][static_cast<std::size_t>(phase)]; }
    int node(const std::string& bus, int phase) const;
    int size() const { return count_; }
    int bus_of(int node) const { return bus_of_[static_cast<std::size_t>(node)]; }
    int phase_of(int node) const { return phase_of_[static_cast<std::size_t>(node)]; }

  private:
    const NetworkModel* net_;
    std::vector<std::array<int, 3>> ids_;
    std::vector<int> bus_of_;
    std::vector<int> phase_of_;
    int count_ = 0;
};

}  // namespace ibrsc
