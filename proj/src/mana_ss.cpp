#include <set>

#include "element_stamps.hpp"
#include "ibrsc/linear_solver.hpp"
#include "ibrsc/linearize.hpp"
#include "ibrsc/mana.hpp"
#include "ibrsc/validate.hpp"

namespace ibrsc {

using detail::vslot;

IndexMap index_linear(const LinearizedNetwork& lin) {
    const NetworkModel& net = lin.base;
    IndexMap ix;
    for (const auto& b : net.buses)
        for (int p = 0; p < 3; ++p)
            if (b.phases.has(p)) ix.add_complex(Block::NodeVoltage, b.id, phase_label(p));
    for (const auto& s : lin.sources)
        for (int p = 0; p < 3; ++p) ix.add_complex(Block::SourceCurrent, s.id, "I." + phase_label(p));
    for (const auto& s : lin.seq_sources) ix.add_complex(Block::SourceCurrent, s.id, "I1");
    for (const auto& t : net.transformers)
        for (int k = 0; k < 3; ++k) ix.add_complex(Block::TransformerCurrent, t.id, "I" + std::to_string(k));
    for (const auto& r : lin.regulators)
        for (int p = 0; p < 3; ++p) ix.add_complex(Block::TransformerCurrent, r.reg.id, "I." + phase_label(p));
    for (const auto& sw : net.switches)
        for (int p = 0; p < 3; ++p)
            if (sw.phases.has(p)) ix.add_complex(Block::SwitchCurrent, sw.id, phase_label(p));
    return ix;
}

namespace {

/// Throws AssemblyError naming every island without a source or shunt path.
void check_anchored(const LinearizedNetwork& lin) {
    int n = 0;
    const auto island = bus_islands(lin.base, &n);
    std::vector<bool> anchored(static_cast<std::size_t>(n), false);
    auto mark = [&](const std::string& bus) {
        const int b = lin.base.bus_index(bus);
        if (b >= 0) anchored[static_cast<std::size_t>(island[static_cast<std::size_t>(b)])] = true;
    };
    for (const auto& s : lin.sources) mark(s.bus);
    for (const auto& s : lin.seq_sources) mark(s.bus);
    for (const auto& s : lin.shunts) mark(s.bus);
    for (const auto& f : lin.faults) mark(f.spec.bus);
    for (const auto& br : lin.base.branches)
        if (!br.y_shunt_abc.isZero(0.0)) mark(br.from);
    std::string msg;
    for (int k = 0; k < n; ++k) {
        if (anchored[static_cast<std::size_t>(k)]) continue;
        std::string members;
        for (std::size_t b = 0; b < lin.base.buses.size(); ++b)
            if (island[b] == k) members += (members.empty() ? "" : ",") + lin.base.buses[b].id;
        msg += (msg.empty() ? "" : "; ") + std::string("floating island {") + members + "}";
    }
    if (!msg.empty()) throw AssemblyError("singular network structure: " + msg);
}

}  // namespace

Eigen::VectorXd assemble_ss_rhs(const LinearizedNetwork& lin, const IndexMap& index) {
    const NetworkModel& net = lin.base;
    NodeMap nodes(net);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(index.size());
    for (const auto& s : lin.sources) {
        const int slot = index.slot(Block::SourceCurrent, s.id, "I.A");
        for (int p = 0; p < 3; ++p) add_complex_to(c, slot + 2 * p, s.e_abc[static_cast<std::size_t>(p)]);
    }
    for (const auto& s : lin.seq_sources) add_complex_to(c, index.slot(Block::SourceCurrent, s.id, "I1"), s.e1);
    for (const auto& inj : lin.injections) detail::add_injection(c, nodes, net, inj.bus, inj.i);
    return c;
}

ManaSystem assemble_ss(const LinearizedNetwork& lin) {
    const NetworkModel& net = lin.base;
    ManaSystem sys;
    sys.kind = SystemKind::SSLinear;
    sys.index = index_linear(lin);
    NodeMap nodes(net);
    Stamper a(sys.index.size());
    Eigen::VectorXd unused = Eigen::VectorXd::Zero(sys.index.size());
    check_anchored(lin);

    try {
        for (const auto& br : net.branches) detail::stamp_branch(a, nodes, br);
        for (const auto& t : net.transformers)
            detail::stamp_transformer(a, nodes, t, sys.index.slot(Block::TransformerCurrent, t.id, "I0"));
        for (const auto& r : lin.regulators)
            detail::stamp_fixed_regulator(a, nodes, r.reg, r.tap, sys.index.slot(Block::TransformerCurrent, r.reg.id, "I.A"));
        for (const auto& sw : net.switches) detail::stamp_switch(a, nodes, sw, sys.index);
        for (const auto& s : lin.sources)
            detail::stamp_source(a, unused, nodes, s, sys.index.slot(Block::SourceCurrent, s.id, "I.A"));
        for (const auto& s : lin.seq_sources)
            detail::stamp_seq_source(a, unused, nodes, s.bus, s.e1, s.z_vi, sys.index.slot(Block::SourceCurrent, s.id, "I1"));
        for (const auto& sh : lin.shunts) detail::stamp_shunt(a, nodes, net, sh.bus, sh.y);
        for (const auto& f : lin.faults) detail::stamp_shunt(a, nodes, net, f.spec.bus, f.y);
    } catch (const InputError& e) {
        throw AssemblyError(std::string("cannot assemble linear system: ") + e.what());
    }
    sys.matrix = a.matrix();
    sys.rhs = assemble_ss_rhs(lin, sys.index);
    return sys;
}

ManaSystem assemble_ss(const NetworkModel& net) { return assemble_ss(nominal_linear_network(net)); }

Eigen::VectorXd solve_linear(const ManaSystem& sys) {
    if (sys.matrix.rows() == 0) return Eigen::VectorXd();
    SparseSolver solver;
    solver.factorize(sys.matrix);
    return solver.solve(sys.rhs);
}

std::vector<Phasor> as_phasors(const IndexMap& index, const Eigen::VectorXd& x) {
    if (!index.all_complex()) throw AssemblyError("solution contains real-valued unknowns");
    std::vector<Phasor> out;
    out.reserve(static_cast<std::size_t>(index.size() / 2));
    for (int k = 0; k < index.size(); k += 2) out.push_back(get_complex(x, k));
    return out;
}

}  // namespace ibrsc
