#include <cmath>

#include "element_stamps.hpp"
#include "ibrsc/mana.hpp"
#include "ibrsc/validate.hpp"

namespace ibrsc {

using detail::vslot;

namespace {

const Phasor kJ{0.0, 1.0};

/// Chain rule through w = c u for real functions: grad_u = conj(c) grad_w.
Phasor through(Phasor c, Phasor grad_w) { return std::conj(c) * grad_w; }

Phasor safe_unit(Phasor v) {
    const double m = std::abs(v);
    return m > 1e-300 ? v / m : Phasor(1.0, 0.0);
}

void stamp_complex_structural(Stamper& s, int r, int k, Phasor c) {
    s.put(r, k, c.real());
    s.put(r, k + 1, -c.imag());
    s.put(r + 1, k, c.imag());
    s.put(r + 1, k + 1, c.real());
}

}  // namespace

IndexMap index_pf(const NetworkModel& net) {
    IndexMap ix;
    for (const auto& b : net.buses)
        for (int p = 0; p < 3; ++p)
            if (b.phases.has(p)) ix.add_complex(Block::NodeVoltage, b.id, phase_label(p));
    for (const auto& s : net.sources)
        for (int p = 0; p < 3; ++p) ix.add_complex(Block::SourceCurrent, s.id, "I." + phase_label(p));
    for (const auto& t : net.transformers)
        for (int k = 0; k < 3; ++k) ix.add_complex(Block::TransformerCurrent, t.id, "I" + std::to_string(k));
    for (const auto& r : net.regulators)
        for (int p = 0; p < 3; ++p) ix.add_complex(Block::TransformerCurrent, r.id, "I." + phase_label(p));
    for (const auto& sw : net.switches)
        for (int p = 0; p < 3; ++p)
            if (sw.phases.has(p)) ix.add_complex(Block::SwitchCurrent, sw.id, phase_label(p));
    for (const auto& ld : net.loads) {
        if (ld.model != LoadModel::ConstantPower) continue;
        for (int p = 0; p < 3; ++p)
            if (ld.phases.has(p)) ix.add_complex(Block::LoadCurrent, ld.id, "I." + phase_label(p));
    }
    for (const auto& g : net.generators)
        for (int p = 0; p < 3; ++p) ix.add_complex(Block::GeneratorCurrent, g.id, "I." + phase_label(p));
    for (const auto& g : net.generators) ix.add_complex(Block::InternalEmf, g.id, "E");
    for (const auto& r : net.regulators)
        for (int p = 0; p < 3; ++p) ix.add_real(Block::RegulatorTap, r.id, "g." + phase_label(p));
    for (const auto& u : net.ibrs)
        for (int p = 0; p < 3; ++p) ix.add_complex(Block::IbrCurrent, u.id, "I." + phase_label(p));
    return ix;
}

Phasor ibr_k_neg(const IbrUnit& u) { return u.k_neg ? *u.k_neg : std::polar(0.01, -kPi / 2.0); }
Phasor ibr_k_zero(const IbrUnit& u) { return u.k_zero ? *u.k_zero : Phasor{}; }

std::vector<IbrConstraintSet> ibr_constraints(const NetworkModel& net) {
    int n_islands = 0;
    const auto island = bus_islands(net, &n_islands);
    std::vector<bool> has_source(static_cast<std::size_t>(n_islands), false);
    for (const auto& s : net.sources) {
        const int b = net.bus_index(s.bus);
        if (b >= 0) has_source[static_cast<std::size_t>(island[static_cast<std::size_t>(b)])] = true;
    }
    std::vector<IbrConstraintSet> out;
    for (const auto& u : net.ibrs) {
        IbrConstraintSet k;
        const double c = ibr_scale(u, net.base);
        k.id = u.id;
        k.mode = u.mode;
        k.p_r = 3.0 * u.p_ref * c;
        k.q_r = 3.0 * u.q_ref * c;
        k.v_r = u.v_ref;
        k.k_neg = c * ibr_k_neg(u);
        k.k_zero = c * ibr_k_zero(u);
        const int b = net.bus_index(u.bus);
        if (u.mode == IbrMode::GFM && b >= 0) {
            const auto isl = static_cast<std::size_t>(island[static_cast<std::size_t>(b)]);
            if (!has_source[isl]) {
                k.slack = true;
                has_source[isl] = true;  // later GFMs in the island regulate P
            }
        }
        out.push_back(k);
    }
    return out;
}

struct PfEquations::Impl {
    struct LoadPhase {
        int v, i;
        Phasor s;
    };
    struct Gen {
        int v[3], i, e;
        double p_sum, e_set;
    };
    struct Reg {
        int vf[3], vt[3], i, g;
        double v_target;
    };
    struct Ibr {
        std::string id;
        int v[3], i;
        IbrConstraintSet k;
    };

    NetworkModel net;
    Stamper lin;
    Eigen::VectorXd c;
    std::vector<LoadPhase> loads;
    std::vector<Gen> gens;
    std::vector<Reg> regs;
    std::vector<Ibr> ibrs;
    std::optional<std::vector<std::array<double, 3>>> fixed;

    /// Adds g(x) to f and its gradient to jac (either may be null).
    void nonlinear(const Eigen::VectorXd& x, Eigen::VectorXd* f, Stamper* jac) const;
    /// IBR constraint rows only; `which` selects 0 = P, 1 = Q/|V1|, -1 = both.
    void ibr_rows(const Ibr& u, const Eigen::VectorXd& x, Eigen::VectorXd* f, Stamper* jac, int which) const;
};

void PfEquations::Impl::ibr_rows(const Ibr& u, const Eigen::VectorXd& x, Eigen::VectorXd* f, Stamper* jac,
                                 int which) const {
    const Mat3& Ainv = seq::analysis();
    Phasor v1{}, i1{};
    for (int p = 0; p < 3; ++p) {
        v1 += Ainv(1, p) * get_complex(x, u.v[p]);
        i1 += Ainv(1, p) * get_complex(x, u.i + 2 * p);
    }
    const Phasor s = v1 * std::conj(i1);  // S1 = -3 s
    auto put = [&](int row, double value, Phasor g_v1, Phasor g_i1, bool with_i) {
        if (f) (*f)[row] += value;
        if (!jac) return;
        for (int p = 0; p < 3; ++p) {
            jac->add_gradient(row, u.v[p], through(Ainv(1, p), g_v1));
            if (with_i) jac->add_gradient(row, u.i + 2 * p, through(Ainv(1, p), g_i1));
        }
    };
    const int r0 = u.i, r1 = u.i + 1;
    if (which != 1) {
        if (u.k.slack)
            put(r0, v1.imag(), kJ, Phasor{}, false);
        else
            put(r0, u.k.p_r - 3.0 * s.real(), -3.0 * i1, -3.0 * v1, true);
    }
    if (which != 0) {
        if (u.k.mode == IbrMode::GFL)
            put(r1, u.k.q_r - 3.0 * s.imag(), -3.0 * kJ * i1, 3.0 * kJ * v1, true);
        else {
            if (f) (*f)[r1] += std::abs(v1) - u.k.v_r;
            if (jac)
                for (int p = 0; p < 3; ++p) jac->add_gradient(r1, u.v[p], through(Ainv(1, p), safe_unit(v1)));
        }
    }
}

void PfEquations::Impl::nonlinear(const Eigen::VectorXd& x, Eigen::VectorXd* f, Stamper* jac) const {
    for (const auto& ld : loads) {
        const Phasor v = get_complex(x, ld.v), i = get_complex(x, ld.i);
        const Phasor s = v * std::conj(i);
        if (f) {
            (*f)[ld.i] += s.real() - ld.s.real();
            (*f)[ld.i + 1] += s.imag() - ld.s.imag();
        }
        if (jac) {
            jac->add_gradient(ld.i, ld.v, i);
            jac->add_gradient(ld.i, ld.i, v);
            jac->add_gradient(ld.i + 1, ld.v, kJ * i);
            jac->add_gradient(ld.i + 1, ld.i, -kJ * v);
        }
    }
    for (const auto& g : gens) {
        double p = 0.0;
        for (int k = 0; k < 3; ++k) {
            const Phasor v = get_complex(x, g.v[k]), i = get_complex(x, g.i + 2 * k);
            p += (v * std::conj(i)).real();
            if (jac) {
                jac->add_gradient(g.e, g.v[k], i);
                jac->add_gradient(g.e, g.i + 2 * k, v);
            }
        }
        const Phasor e = get_complex(x, g.e);
        if (f) {
            (*f)[g.e] += p - g.p_sum;
            (*f)[g.e + 1] += std::abs(e) - g.e_set;
        }
        if (jac) jac->add_gradient(g.e + 1, g.e, safe_unit(e));
    }
    for (std::size_t r = 0; r < regs.size(); ++r) {
        const auto& rg = regs[r];
        for (int p = 0; p < 3; ++p) {
            const int gs = rg.g + p;
            const double g = x[gs];
            const int ip = rg.i + 2 * p;
            const Phasor vf = get_complex(x, rg.vf[p]), vt = get_complex(x, rg.vt[p]), i = get_complex(x, ip);
            if (f) {
                add_complex_to(*f, ip, -g * vf);
                add_complex_to(*f, rg.vt[p], -i / g);
                if (!fixed) (*f)[gs] += std::abs(vt) - rg.v_target;
            }
            if (jac) {
                jac->add_complex(ip, rg.vf[p], -g);
                jac->add(ip, gs, -vf.real());
                jac->add(ip + 1, gs, -vf.imag());
                jac->add_complex(rg.vt[p], ip, -1.0 / g);
                jac->add(rg.vt[p], gs, i.real() / (g * g));
                jac->add(rg.vt[p] + 1, gs, i.imag() / (g * g));
                if (!fixed) jac->add_gradient(gs, rg.vt[p], safe_unit(vt));
            }
        }
    }
    for (const auto& u : ibrs) ibr_rows(u, x, f, jac, -1);
}

PfEquations::PfEquations(const NetworkModel& net, std::optional<std::vector<std::array<double, 3>>> fixed_taps)
    : index_(index_pf(net)) {
    auto impl = std::make_shared<Impl>();
    impl->net = net;
    impl->fixed = std::move(fixed_taps);
    const NetworkModel& n = impl->net;
    if (impl->fixed && impl->fixed->size() != n.regulators.size())
        throw InputError("fixed tap list does not match the regulator count");
    NodeMap nodes(n);
    const int size = index_.size();
    impl->lin = Stamper(size);
    impl->c = Eigen::VectorXd::Zero(size);
    Stamper& L = impl->lin;
    Eigen::VectorXd& c = impl->c;
    const Mat3& Ainv = seq::analysis();

    for (const auto& br : n.branches) detail::stamp_branch(L, nodes, br);
    for (const auto& t : n.transformers)
        detail::stamp_transformer(L, nodes, t, index_.slot(Block::TransformerCurrent, t.id, "I0"));
    for (const auto& sw : n.switches) detail::stamp_switch(L, nodes, sw, index_);
    for (const auto& s : n.sources) detail::stamp_source(L, c, nodes, s, index_.slot(Block::SourceCurrent, s.id, "I.A"));

    for (const auto& ld : n.loads) {
        for (int p = 0; p < 3; ++p) {
            if (!ld.phases.has(p)) continue;
            const int v = vslot(nodes, ld.bus, p);
            const Phasor s = ld.s[static_cast<std::size_t>(p)];
            if (ld.model == LoadModel::ConstantImpedance) {
                L.add_complex(v, v, std::conj(s));
                continue;
            }
            const int i = index_.slot(Block::LoadCurrent, ld.id, "I." + phase_label(p));
            L.add_complex(v, i, 1.0);
            impl->loads.push_back({v, i, s});
        }
    }

    const Phasor a = seq::a_op;
    const Phasor rot[3] = {1.0, a * a, a};
    for (const auto& g : n.generators) {
        Impl::Gen G{};
        G.i = index_.slot(Block::GeneratorCurrent, g.id, "I.A");
        G.e = index_.slot(Block::InternalEmf, g.id, "E");
        G.p_sum = 3.0 * g.p_set;
        G.e_set = g.e_set;
        for (int p = 0; p < 3; ++p) {
            G.v[p] = vslot(nodes, g.bus, p);
            const int ip = G.i + 2 * p;
            L.add_complex(G.v[p], ip, -1.0);
            L.add_complex(ip, G.v[p], 1.0);
            L.add_complex(ip, ip, g.z_machine);
            L.add_complex(ip, G.e, -rot[p]);
        }
        impl->gens.push_back(G);
    }

    for (std::size_t r = 0; r < n.regulators.size(); ++r) {
        const auto& rg = n.regulators[r];
        Impl::Reg R{};
        R.i = index_.slot(Block::TransformerCurrent, rg.id, "I.A");
        R.g = index_.slot(Block::RegulatorTap, rg.id, "g.A");
        R.v_target = rg.v_target;
        for (int p = 0; p < 3; ++p) {
            R.vf[p] = vslot(nodes, rg.from, p);
            R.vt[p] = vslot(nodes, rg.to, p);
            const int ip = R.i + 2 * p;
            L.add_complex(R.vf[p], ip, 1.0);
            L.add_complex(ip, R.vt[p], 1.0);
            if (impl->fixed) {
                L.add(R.g + p, R.g + p, 1.0);
                c[R.g + p] += (*impl->fixed)[r][static_cast<std::size_t>(p)];
            }
        }
        impl->regs.push_back(R);
    }

    const auto constraints = ibr_constraints(n);
    for (std::size_t k = 0; k < n.ibrs.size(); ++k) {
        const auto& u = n.ibrs[k];
        Impl::Ibr U{};
        U.id = u.id;
        U.k = constraints[k];
        U.i = index_.slot(Block::IbrCurrent, u.id, "I.A");
        for (int p = 0; p < 3; ++p) {
            U.v[p] = vslot(nodes, u.bus, p);
            L.add_complex(U.v[p], U.i + 2 * p, -1.0);
        }
        // Negative sequence: K_neg V2 - I2 = 0 (rows of I.B).
        const int rn = U.i + 2, rz = U.i + 4;
        for (int p = 0; p < 3; ++p) {
            stamp_complex_structural(L, rn, U.v[p], U.k.k_neg * Ainv(2, p));
            stamp_complex_structural(L, rn, U.i + 2 * p, -Ainv(2, p));
        }
        // Zero sequence: K_zero V0 - I0 = 0 (rows of I.C). A^-1 row 0 is real.
        for (int p = 0; p < 3; ++p) {
            stamp_complex_structural(L, rz, U.v[p], U.k.k_zero * Ainv(0, p));
            L.put(rz, U.i + 2 * p, -Ainv(0, p).real());
            L.put(rz + 1, U.i + 2 * p + 1, -Ainv(0, p).real());
        }
        impl->ibrs.push_back(U);
    }
    impl_ = std::move(impl);
}

Eigen::VectorXd PfEquations::residual(const Eigen::VectorXd& x) const {
    Eigen::VectorXd f = -impl_->c;
    impl_->lin.multiply_add(x, f);
    impl_->nonlinear(x, &f, nullptr);
    return f;
}

Eigen::SparseMatrix<double> PfEquations::jacobian(const Eigen::VectorXd& x) const {
    Stamper j(index_.size());
    j.append(impl_->lin);
    impl_->nonlinear(x, nullptr, &j);
    return j.matrix();
}

Eigen::VectorXd PfEquations::flat_start() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(index_.size());
    const auto bal = balanced_set(1.0);
    for (const auto& u : index_.unknowns()) {
        if (u.block == Block::NodeVoltage) {
            const int p = u.label[0] - 'A';
            set_complex(x, u.slot, bal[static_cast<std::size_t>(p)]);
        }
    }
    for (std::size_t k = 0; k < impl_->gens.size(); ++k) set_complex(x, impl_->gens[k].e, impl_->gens[k].e_set);
    for (std::size_t r = 0; r < impl_->regs.size(); ++r)
        for (int p = 0; p < 3; ++p)
            x[impl_->regs[r].g + p] = impl_->fixed ? (*impl_->fixed)[r][static_cast<std::size_t>(p)] : 1.0;
    return x;
}

PfEquations::IbrEntryCounts PfEquations::ibr_entry_counts(const std::string& ibr, const Eigen::VectorXd& x) const {
    const Impl::Ibr* unit = nullptr;
    for (const auto& u : impl_->ibrs)
        if (u.id == ibr) unit = &u;
    if (!unit) throw InputError("unknown IBR '" + ibr + "'");
    const int lo = unit->i, hi = unit->i + 6;
    auto count = [&](const Stamper& s, int r_lo, int r_hi) {
        EntryCount e;
        for (const auto& t : s.triplets()) {
            if (t.row() < r_lo || t.row() >= r_hi) continue;
            if (t.col() >= lo && t.col() < hi)
                ++e.d;
            else
                ++e.c;
        }
        return e;
    };
    IbrEntryCounts out;
    Stamper s(index_.size());
    impl_->ibr_rows(*unit, x, nullptr, &s, -1);
    out.positive_pq = count(s, lo, lo + 2);
    out.positive_p = count(s, lo, lo + 1);
    out.v1_magnitude = unit->k.mode == IbrMode::GFM ? count(s, lo + 1, lo + 2) : EntryCount{};
    out.negative = count(impl_->lin, lo + 2, lo + 4);
    out.zero = count(impl_->lin, lo + 4, lo + 6);
    return out;
}

Eigen::VectorXd residuals(const NetworkModel& net, const Eigen::VectorXd& x) { return PfEquations(net).residual(x); }

ManaSystem assemble_pf_jacobian(const NetworkModel& net, const Eigen::VectorXd& x) {
    PfEquations eq(net);
    ManaSystem sys;
    sys.kind = SystemKind::PFJacobian;
    sys.index = eq.index();
    sys.matrix = eq.jacobian(x);
    sys.rhs = -eq.residual(x);
    return sys;
}

}  // namespace ibrsc
