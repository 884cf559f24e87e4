#include "ibrsc/netmodel.hpp"

#include "ibrsc/errors.hpp"
#include "ibrsc/seq.hpp"

namespace ibrsc {

int NetworkModel::bus_index(const std::string& id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return static_cast<int>(i);
    return -1;
}

const Bus& NetworkModel::bus(const std::string& id) const {
    const int i = bus_index(id);
    if (i < 0) throw InputError("unknown bus '" + id + "'");
    return buses[static_cast<std::size_t>(i)];
}

const IbrUnit& NetworkModel::ibr(const std::string& id) const {
    for (const auto& u : ibrs)
        if (u.id == id) return u;
    throw InputError("unknown IBR '" + id + "'");
}

double transformer_phase_shift(const Transformer& t) {
    if (t.phase_shift) return *t.phase_shift;
    const bool d_from = t.from_conn == Winding::Delta;
    const bool d_to = t.to_conn == Winding::Delta;
    return d_from != d_to ? deg_to_rad(30.0) : 0.0;
}

Mat3 phase_matrix_from_sequence_impedance(Phasor z1, Phasor z0) {
    return seq::phase_matrix_from_sequence(z0, z1, z1);
}

std::array<Phasor, 3> balanced_set(Phasor e) {
    const Phasor a = seq::a_op;
    return {e, e * a * a, e * a};
}

NodeMap::NodeMap(const NetworkModel& net) : net_(&net) {
    ids_.resize(net.buses.size());
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
        for (int p = 0; p < 3; ++p) {
            if (net.buses[b].phases.has(p)) {
                ids_[b][static_cast<std::size_t>(p)] = count_++;
                bus_of_.push_back(static_cast<int>(b));
                phase_of_.push_back(p);
            } else {
                ids_[b][static_cast<std::size_t>(p)] = -1;
            }
        }
    }
}

int NodeMap::node(const std::string& bus, int phase) const {
    const int b = net_->bus_index(bus);
    if (b < 0) throw InputError("unknown bus '" + bus + "'");
    return node(b, phase);
}

}  // namespace ibrsc
