#include "element_stamps.hpp"

#include "ibrsc/seq.hpp"

namespace ibrsc::detail {

namespace {

std::vector<int> phase_list(PhaseSet ph) {
    std::vector<int> out;
    for (int p = 0; p < 3; ++p)
        if (ph.has(p)) out.push_back(p);
    return out;
}

}  // namespace

void stamp_branch(Stamper& a, const NodeMap& nodes, const Branch& br) {
    const auto ph = phase_list(br.phases);
    const auto n = static_cast<Eigen::Index>(ph.size());
    Eigen::MatrixXcd z(n, n), ysh(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            z(i, j) = br.z_abc(ph[static_cast<std::size_t>(i)], ph[static_cast<std::size_t>(j)]);
            ysh(i, j) = 0.5 * br.y_shunt_abc(ph[static_cast<std::size_t>(i)], ph[static_cast<std::size_t>(j)]);
        }
    const Eigen::MatrixXcd y = z.inverse();
    for (Eigen::Index i = 0; i < n; ++i) {
        const int fi = vslot(nodes, br.from, ph[static_cast<std::size_t>(i)]);
        const int ti = vslot(nodes, br.to, ph[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j) {
            const int fj = vslot(nodes, br.from, ph[static_cast<std::size_t>(j)]);
            const int tj = vslot(nodes, br.to, ph[static_cast<std::size_t>(j)]);
            a.add_complex(fi, fj, y(i, j) + ysh(i, j));
            a.add_complex(fi, tj, -y(i, j));
            a.add_complex(ti, fj, -y(i, j));
            a.add_complex(ti, tj, y(i, j) + ysh(i, j));
        }
    }
}

void stamp_shunt(Stamper& a, const NodeMap& nodes, const NetworkModel& net, const std::string& bus, const Mat3& y) {
    const PhaseSet ph = net.bus(bus).phases;
    for (int i = 0; i < 3; ++i) {
        if (!ph.has(i)) continue;
        for (int j = 0; j < 3; ++j) {
            if (!ph.has(j)) continue;
            a.add_complex(vslot(nodes, bus, i), vslot(nodes, bus, j), y(i, j));
        }
    }
}

void stamp_transformer(Stamper& a, const NodeMap& nodes, const Transformer& tr, int slot) {
    const Mat3& A = seq::synthesis();
    const Mat3& Ainv = seq::analysis();
    const double theta = transformer_phase_shift(tr);
    const Phasor ratio[3] = {tr.tap, std::polar(tr.tap, theta), std::polar(tr.tap, -theta)};

    // Per sequence k: KCL coefficients (cp, cs) and constraint coefficients
    // alpha_p V_p,k + alpha_s V_s,k + beta I_k = 0.
    Phasor cp[3], cs[3], ap[3], as[3], beta[3];
    for (int k = 1; k <= 2; ++k) {
        cp[k] = 1.0;
        cs[k] = -std::conj(ratio[k]);
        ap[k] = 1.0;
        as[k] = -ratio[k];
        beta[k] = -tr.z_leak;
    }
    const bool g_from = tr.from_conn == Winding::WyeGrounded;
    const bool g_to = tr.to_conn == Winding::WyeGrounded;
    const bool d_from = tr.from_conn == Winding::Delta;
    const bool d_to = tr.to_conn == Winding::Delta;
    if (tr.z0_path && g_from && g_to) {
        cp[0] = 1.0;
        cs[0] = -tr.tap;
        ap[0] = 1.0;
        as[0] = -tr.tap;
        beta[0] = -*tr.z0_path;
    } else if (tr.z0_path && g_from && d_to) {
        cp[0] = 1.0;
        ap[0] = 1.0;
        beta[0] = -*tr.z0_path;
    } else if (tr.z0_path && d_from && g_to) {
        cs[0] = 1.0;
        as[0] = 1.0;
        beta[0] = -*tr.z0_path;
    } else {
        beta[0] = 1.0;  // blocked: I0 = 0
    }

    for (int k = 0; k < 3; ++k) {
        const int ik = slot + 2 * k;
        for (int p = 0; p < 3; ++p) {
            const int vp = vslot(nodes, tr.from, p);
            const int vs = vslot(nodes, tr.to, p);
            a.add_complex(vp, ik, A(p, k) * cp[k]);
            a.add_complex(vs, ik, A(p, k) * cs[k]);
            a.add_complex(ik, vp, ap[k] * Ainv(k, p));
            a.add_complex(ik, vs, as[k] * Ainv(k, p));
        }
        a.add_complex(ik, ik, beta[k]);
    }

    // An ungrounded winding leaves its zero-sequence voltage undetermined;
    // a negligible zero-sequence shunt pins it.
    const Mat3 y0 = A * Eigen::Vector3cd(kFloatingNeutralAdmittance, 0.0, 0.0).asDiagonal() * Ainv;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (!g_from) a.add_complex(vslot(nodes, tr.from, i), vslot(nodes, tr.from, j), y0(i, j));
            if (!g_to) a.add_complex(vslot(nodes, tr.to, i), vslot(nodes, tr.to, j), y0(i, j));
        }
}

void stamp_switch(Stamper& a, const NodeMap& nodes, const Switch& sw, const IndexMap& index) {
    for (int p = 0; p < 3; ++p) {
        if (!sw.phases.has(p)) continue;
        const int is = index.slot(Block::SwitchCurrent, sw.id, phase_label(p));
        const int vf = vslot(nodes, sw.from, p);
        const int vt = vslot(nodes, sw.to, p);
        a.add_complex(vf, is, 1.0);
        a.add_complex(vt, is, -1.0);
        if (sw.closed[static_cast<std::size_t>(p)]) {
            a.add_complex(is, vf, 1.0);
            a.add_complex(is, vt, -1.0);
        } else {
            a.add_complex(is, is, 1.0);
        }
    }
}

void stamp_source(Stamper& a, Eigen::VectorXd& c, const NodeMap& nodes, const SourceIdeal& src, int slot) {
    for (int p = 0; p < 3; ++p) {
        const int ip = slot + 2 * p;
        const int vp = vslot(nodes, src.bus, p);
        a.add_complex(vp, ip, -1.0);
        a.add_complex(ip, vp, 1.0);
        for (int q = 0; q < 3; ++q) a.add_complex(ip, slot + 2 * q, src.z_int(p, q));
        add_complex_to(c, ip, src.e_abc[static_cast<std::size_t>(p)]);
    }
}

void stamp_seq_source(Stamper& a, Eigen::VectorXd& c, const NodeMap& nodes, const std::string& bus, Phasor e1,
                      Phasor z_vi, int slot) {
    const Mat3& A = seq::synthesis();
    const Mat3& Ainv = seq::analysis();
    for (int p = 0; p < 3; ++p) {
        const int vp = vslot(nodes, bus, p);
        a.add_complex(vp, slot, -A(p, 1));
        a.add_complex(slot, vp, Ainv(1, p));
    }
    a.add_complex(slot, slot, z_vi);
    add_complex_to(c, slot, e1);
}

void stamp_fixed_regulator(Stamper& a, const NodeMap& nodes, const Regulator& rg, const std::array<double, 3>& tap,
                           int slot) {
    for (int p = 0; p < 3; ++p) {
        const double g = tap[static_cast<std::size_t>(p)];
        const int ip = slot + 2 * p;
        const int vf = vslot(nodes, rg.from, p);
        const int vt = vslot(nodes, rg.to, p);
        a.add_complex(vf, ip, 1.0);
        a.add_complex(vt, ip, -1.0 / g);
        a.add_complex(ip, vt, 1.0);
        a.add_complex(ip, vf, -g);
    }
}

void add_injection(Eigen::VectorXd& c, const NodeMap& nodes, const NetworkModel& net, const std::string& bus,
                   const Vec3& i) {
    const PhaseSet ph = net.bus(bus).phases;
    for (int p = 0; p < 3; ++p)
        if (ph.has(p)) add_complex_to(c, vslot(nodes, bus, p), i(p));
}

}  // namespace ibrsc::detail
