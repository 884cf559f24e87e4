#include "ibrsc/linearize.hpp"

#include "ibrsc/errors.hpp"
#include "ibrsc/seq.hpp"

namespace ibrsc {

const IbrLinearState& LinearizedNetwork::ibr(const std::string& id) const {
    for (const auto& s : ibrs)
        if (s.id == id) return s;
    throw InputError("unknown IBR '" + id + "'");
}

namespace {

Vec3 from_sequence(Phasor s0, Phasor s1, Phasor s2) { return seq::to_phase(Vec3(s0, s1, s2)); }

/// Adds the IBR's shunts, injections and sources given its LV sequence
/// voltages and injected LV sequence currents (system pu).
void add_ibr(LinearizedNetwork& lin, const IbrUnit& u, const Vec3& v012, const Vec3& i012_lv_sys) {
    const double c = ibr_scale(u, lin.base.base);
    IbrLinearState st;
    st.id = u.id;
    st.bus = u.bus;
    st.mode = u.mode;
    st.scale = c;
    st.has_filter = u.z_filter.has_value();
    st.z_filter = u.z_filter.value_or(Phasor{});
    st.k_neg = u.k_neg ? *u.k_neg : std::polar(0.01, -kPi / 2.0);
    st.k_zero = u.k_zero.value_or(Phasor{});
    st.v0_pre = v012(0);
    st.v1_pre = v012(1);
    st.v2_pre = v012(2);
    st.i1_lv_pre = i012_lv_sys(1) / c;
    st.i2_lv_pre = i012_lv_sys(2) / c;
    st.i1_pre = st.i1_lv_pre + (st.has_filter ? st.v1_pre / st.z_filter : Phasor{});
    st.i2_pre = st.i2_lv_pre + (st.has_filter ? st.v2_pre / st.z_filter : Phasor{});
    st.e1_pre = st.v1_pre;
    st.q_ref = (st.v1_pre * std::conj(st.i1_lv_pre) + st.i2_lv_pre * std::conj(st.v2_pre)).imag();
    st.v_ref = std::abs(st.e1_pre);

    if (st.has_filter) {
        const Phasor yf = c / st.z_filter;
        lin.shunts.push_back({u.id + ".filter", u.bus, seq::phase_matrix_from_sequence(0.0, yf, yf), ShuntRole::IbrFilter, u.id});
    }
    if (st.k_zero != Phasor{})
        lin.shunts.push_back(
            {u.id + ".zero", u.bus, seq::phase_matrix_from_sequence(-c * st.k_zero, 0.0, 0.0), ShuntRole::IbrZero, u.id});

    if (u.mode == IbrMode::GFL) {
        lin.injections.push_back({u.id + ".inj", u.bus, from_sequence(0.0, c * st.i1_pre, c * st.i2_pre), u.id});
    } else {
        lin.seq_sources.push_back({u.id + ".e1", u.bus, st.e1_pre, Phasor{}, u.id});
        lin.injections.push_back({u.id + ".inj", u.bus, from_sequence(0.0, 0.0, c * st.i2_pre), u.id});
    }
    lin.ibrs.push_back(st);
}

Mat3 diag_on(PhaseSet ph, const std::array<Phasor, 3>& y) {
    Mat3 m = Mat3::Zero();
    for (int p = 0; p < 3; ++p)
        if (ph.has(p)) m(p, p) = y[static_cast<std::size_t>(p)];
    return m;
}

SourceIdeal generator_source(const Generator& g, Phasor e) {
    SourceIdeal s;
    s.id = g.id;
    s.bus = g.bus;
    s.e_abc = balanced_set(e);
    s.z_int = Mat3::Identity() * g.z_machine;
    return s;
}

}  // namespace

LinearizedNetwork nominal_linear_network(const NetworkModel& net) {
    LinearizedNetwork lin;
    lin.base = net;
    lin.sources = net.sources;
    for (const auto& g : net.generators) lin.sources.push_back(generator_source(g, g.e_set));
    for (const auto& r : net.regulators) lin.regulators.push_back({r, r.tap_init});
    for (const auto& ld : net.loads) {
        std::array<Phasor, 3> y{};
        for (int p = 0; p < 3; ++p) y[static_cast<std::size_t>(p)] = std::conj(ld.s[static_cast<std::size_t>(p)]);
        lin.shunts.push_back({ld.id, ld.bus, diag_on(ld.phases, y), ShuntRole::Load, ld.id});
    }
    for (const auto& u : net.ibrs) {
        const double c = ibr_scale(u, net.base);
        const Phasor v1 = u.mode == IbrMode::GFM ? Phasor(u.v_ref, 0.0) : Phasor(1.0, 0.0);
        const Phasor i1 = c * std::conj(Phasor(u.p_ref, u.q_ref) / v1);
        add_ibr(lin, u, Vec3(0.0, v1, 0.0), Vec3(0.0, i1, 0.0));
    }
    return lin;
}

LinearizedNetwork linearize(const NetworkModel& net, const PfSolution& pf) {
    LinearizedNetwork lin;
    lin.base = net;
    lin.sources = net.sources;
    for (const auto& g : net.generators) lin.sources.push_back(generator_source(g, pf.emf(g.id)));
    for (const auto& r : net.regulators) lin.regulators.push_back({r, {pf.tap(r.id, 0), pf.tap(r.id, 1), pf.tap(r.id, 2)}});
    for (const auto& ld : net.loads) {
        std::array<Phasor, 3> y{};
        for (int p = 0; p < 3; ++p) {
            if (!ld.phases.has(p)) continue;
            const Phasor s = ld.s[static_cast<std::size_t>(p)];
            if (ld.model == LoadModel::ConstantImpedance) {
                y[static_cast<std::size_t>(p)] = std::conj(s);
                continue;
            }
            const double vm2 = std::norm(pf.voltage(ld.bus, p));
            if (!(vm2 > 1e-24))
                throw InputError("load '" + ld.id + "' phase " + phase_letter(p) + " has zero power-flow voltage");
            y[static_cast<std::size_t>(p)] = std::conj(s) / vm2;
        }
        lin.shunts.push_back({ld.id, ld.bus, diag_on(ld.phases, y), ShuntRole::Load, ld.id});
    }
    for (const auto& u : net.ibrs) {
        const Vec3 v012 = seq::to_sequence(pf.bus_voltage(u.bus));
        const Vec3 i012 = seq::to_sequence(pf.ibr_current(u.id));
        add_ibr(lin, u, v012, i012);
    }
    return lin;
}

Vec3 ss_bus_voltage(const LinearizedNetwork& lin, const IndexMap& index, const Eigen::VectorXd& x, const std::string& bus) {
    Vec3 v = Vec3::Zero();
    const PhaseSet ph = lin.base.bus(bus).phases;
    for (int p = 0; p < 3; ++p)
        if (ph.has(p)) v(p) = get_complex(x, index.slot(Block::NodeVoltage, bus, phase_label(p)));
    return v;
}

Thevenin thevenin_at(const LinearizedNetwork& lin, const std::string& ibr, Phasor own_i2_lv) {
    const IbrLinearState& st = lin.ibr(ibr);
    LinearizedNetwork port = lin;
    std::erase_if(port.shunts, [&](const ShuntElement& s) { return s.owner == ibr && s.role == ShuntRole::IbrFilter; });
    std::erase_if(port.seq_sources, [&](const SequenceSource& s) { return s.owner == ibr; });
    std::erase_if(port.injections, [&](const CurrentInjection& s) { return s.owner == ibr; });

    Thevenin th;
    try {
        LinearizedNetwork dead = port;
        for (auto& s : dead.sources) s.e_abc = {};
        for (auto& s : dead.seq_sources) s.e1 = 0.0;
        dead.injections.clear();
        dead.injections.push_back({ibr + ".probe", st.bus, from_sequence(0.0, 1.0, 0.0), ibr});
        const ManaSystem sz = assemble_ss(dead);
        const Eigen::VectorXd xz = solve_linear(sz);
        th.z_eq = seq::to_sequence(ss_bus_voltage(dead, sz.index, xz, st.bus))(1);

        port.injections.push_back({ibr + ".probe", st.bus, from_sequence(0.0, 0.0, own_i2_lv), ibr});
        const ManaSystem sv = assemble_ss(port);
        const Eigen::VectorXd xv = solve_linear(sv);
        th.v_eq = seq::to_sequence(ss_bus_voltage(port, sv.index, xv, st.bus))(1);
    } catch (const AssemblyError& e) {
        throw AssemblyError("Thevenin equivalent at '" + ibr + "': " + e.what());
    }
    return th;
}

}  // namespace ibrsc
