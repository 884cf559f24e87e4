#pragma once

#include <string>
#include <vector>

#include "ibrsc/io.hpp"
#include "ibrsc/netmodel.hpp"

namespace fixtures {

inline std::string corpus(const std::string& name) { return std::string(IBRSC_DATA_DIR) + "/corpus/" + name + ".json"; }
inline std::string scenario(const std::string& name) {
    return std::string(IBRSC_DATA_DIR) + "/scenarios/" + name + ".json";
}
inline ibrsc::NetworkModel load(const std::string& name) { return ibrsc::parse_network(corpus(name)); }

inline const std::vector<std::string>& corpus_names() {
    static const std::vector<std::string> names{"two_bus",         "three_bus_loads",   "gfm_radial",
                                                "gfl_radial",      "unbalanced_laterals", "feeder34",
                                                "transmission_loop", "all_gfl_stressed"};
    return names;
}

/// Networks with at most six buses (covered by the nodal oracle).
inline const std::vector<std::string>& small_corpus() {
    static const std::vector<std::string> names{"two_bus", "three_bus_loads", "gfm_radial", "gfl_radial",
                                                "unbalanced_laterals"};
    return names;
}

inline ibrsc::Bus bus3(const std::string& id, double kv = 12.47) { return {id, ibrsc::PhaseSet::abc(), kv}; }

inline ibrsc::SourceIdeal ideal_source(const std::string& id, const std::string& bus, ibrsc::Phasor e = 1.0,
                                       ibrsc::Mat3 z = ibrsc::Mat3::Zero()) {
    return {id, bus, ibrsc::balanced_set(e), z};
}

inline ibrsc::Branch line(const std::string& id, const std::string& from, const std::string& to, ibrsc::Phasor z1,
                          ibrsc::Phasor z0) {
    ibrsc::Branch b;
    b.id = id;
    b.from = from;
    b.to = to;
    b.z_abc = ibrsc::phase_matrix_from_sequence_impedance(z1, z0);
    return b;
}

inline ibrsc::Load load_z(const std::string& id, const std::string& bus, ibrsc::Phasor s) {
    ibrsc::Load l;
    l.id = id;
    l.bus = bus;
    l.s = {s, s, s};
    l.model = ibrsc::LoadModel::ConstantImpedance;
    return l;
}

inline ibrsc::Load load_pq(const std::string& id, const std::string& bus, ibrsc::Phasor s) {
    ibrsc::Load l = load_z(id, bus, s);
    l.model = ibrsc::LoadModel::ConstantPower;
    return l;
}

}  // namespace fixtures
