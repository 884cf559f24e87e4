#pragma once

// Linear element stamps shared by the SS assembly and the PF equations.
// Every function adds J-entries to `a` and constant terms to `c`, so that the
// element's contribution to the residual is a x - c.

#include "ibrsc/index_map.hpp"
#include "ibrsc/netmodel.hpp"
#include "ibrsc/stamps.hpp"

namespace ibrsc::detail {

inline int vslot(const NodeMap& nodes, const std::string& bus, int p) { return voltage_slot(nodes.node(bus, p)); }

void stamp_branch(Stamper& a, const NodeMap& nodes, const Branch& br);
/// y over the present phases of `bus`; entries on absent phases must be zero.
void stamp_shunt(Stamper& a, const NodeMap& nodes, const NetworkModel& net, const std::string& bus, const Mat3& y);
/// Sequence-current transformer model; `slot` is the first of I0, I1, I2.
void stamp_transformer(Stamper& a, const NodeMap& nodes, const Transformer& tr, int slot);
void stamp_switch(Stamper& a, const NodeMap& nodes, const Switch& sw, const IndexMap& index);
/// Ideal source rows V + Z I - E = 0; `slot` is I.A (three consecutive currents).
void stamp_source(Stamper& a, Eigen::VectorXd& c, const NodeMap& nodes, const SourceIdeal& src, int slot);
/// E1 behind z_vi; `slot` is the source's positive-sequence current.
void stamp_seq_source(Stamper& a, Eigen::VectorXd& c, const NodeMap& nodes, const std::string& bus, Phasor e1,
                      Phasor z_vi, int slot);
/// Regulator with fixed taps; `slot` is I.A of three consecutive currents.
void stamp_fixed_regulator(Stamper& a, const NodeMap& nodes, const Regulator& rg, const std::array<double, 3>& tap,
                           int slot);
/// Constant current injected into the bus phases.
void add_injection(Eigen::VectorXd& c, const NodeMap& nodes, const NetworkModel& net, const std::string& bus,
                   const Vec3& i);

}  // namespace ibrsc::detail
