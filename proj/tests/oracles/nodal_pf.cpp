#include "nodal_pf.hpp"

#include <stdexcept>
#include <vector>

namespace oracle {

using ibrsc::Mat3;
using ibrsc::Phasor;
using ibrsc::Vec3;

namespace {

const Phasor a = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

Mat3 synth() {
    Mat3 m;
    m << 1, 1, 1, 1, a * a, a, 1, a, a * a;
    return m;
}

struct Nodes {
    std::vector<std::array<int, 3>> id;
    int n = 0;

    explicit Nodes(const ibrsc::NetworkModel& net) {
        for (const auto& b : net.buses) {
            std::array<int, 3> row{-1, -1, -1};
            for (int p = 0; p < 3; ++p)
                if (b.phases.has(p)) row[static_cast<std::size_t>(p)] = n++;
            id.push_back(row);
        }
    }
    int at(const ibrsc::NetworkModel& net, const std::string& bus, int p) const {
        const int b = net.bus_index(bus);
        if (b < 0) throw std::invalid_argument("unknown bus " + bus);
        return id[static_cast<std::size_t>(b)][static_cast<std::size_t>(p)];
    }
};

// Adds a 3x3 block between two three-phase buses.
void add_block(Eigen::MatrixXcd& Y, const Nodes& nd, const ibrsc::NetworkModel& net, const std::string& r,
               const std::string& c, const Mat3& y) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int ri = nd.at(net, r, i), cj = nd.at(net, c, j);
            if (ri < 0 || cj < 0) {
                if (std::abs(y(i, j)) > 0) throw std::invalid_argument("block on a missing phase");
                continue;
            }
            Y(ri, cj) += y(i, j);
        }
}

struct Ibr {
    int v[3];
    Phasor k_neg, k_zero;
    double p = 0.0, q = 0.0, v_ref = 1.0;
    bool gfm = false, slack = false;
};

}  // namespace

Eigen::MatrixXcd dense_ybus(const ibrsc::NetworkModel& net) {
    if (!net.generators.empty() || !net.regulators.empty() || !net.switches.empty())
        throw std::invalid_argument("nodal oracle handles branches, transformers, sources, loads and IBRs only");
    const Nodes nd(net);
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(nd.n, nd.n);
    const Mat3 A = synth();
    const Mat3 Ai = A.inverse();

    for (const auto& br : net.branches) {
        std::vector<int> ph;
        for (int p = 0; p < 3; ++p)
            if (br.phases.has(p)) ph.push_back(p);
        const auto m = static_cast<Eigen::Index>(ph.size());
        Eigen::MatrixXcd z(m, m), ysh(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) {
                z(i, j) = br.z_abc(ph[static_cast<std::size_t>(i)], ph[static_cast<std::size_t>(j)]);
                ysh(i, j) = br.y_shunt_abc(ph[static_cast<std::size_t>(i)], ph[static_cast<std::size_t>(j)]) / 2.0;
            }
        const Eigen::MatrixXcd y = z.inverse();
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) {
                const int fi = nd.at(net, br.from, ph[static_cast<std::size_t>(i)]);
                const int fj = nd.at(net, br.from, ph[static_cast<std::size_t>(j)]);
                const int ti = nd.at(net, br.to, ph[static_cast<std::size_t>(i)]);
                const int tj = nd.at(net, br.to, ph[static_cast<std::size_t>(j)]);
                Y(fi, fj) += y(i, j) + ysh(i, j);
                Y(ti, tj) += y(i, j) + ysh(i, j);
                Y(fi, tj) -= y(i, j);
                Y(ti, fj) -= y(i, j);
            }
    }

    // Transformers in sequence form: I_k = y_k (V_p,k - t_k V_s,k) enters the
    // primary and conj(t_k) I_k leaves the secondary.
    using ibrsc::Winding;
    for (const auto& t : net.transformers) {
        const double th = ibrsc::transformer_phase_shift(t);
        Phasor ypp[3]{}, yps[3]{}, ysp[3]{}, yss[3]{};
        for (int k = 1; k <= 2; ++k) {
            const Phasor r = std::polar(t.tap, k == 1 ? th : -th);
            const Phasor y = 1.0 / t.z_leak;
            ypp[k] = y;
            yps[k] = -y * r;
            ysp[k] = -y * std::conj(r);
            yss[k] = y * std::norm(r);
        }
        const bool gp = t.from_conn == Winding::WyeGrounded, gs = t.to_conn == Winding::WyeGrounded;
        const bool dp = t.from_conn == Winding::Delta, ds = t.to_conn == Winding::Delta;
        if (t.z0_path) {
            const Phasor y0 = 1.0 / *t.z0_path;
            if (gp && gs) {
                ypp[0] = y0;
                yps[0] = -y0 * t.tap;
                ysp[0] = -y0 * t.tap;
                yss[0] = y0 * t.tap * t.tap;
            } else if (gp && ds) {
                ypp[0] = y0;
            } else if (dp && gs) {
                yss[0] = y0;
            }
        }
        if (!gp) ypp[0] += ibrsc::kFloatingNeutralAdmittance;
        if (!gs) yss[0] += ibrsc::kFloatingNeutralAdmittance;
        auto ph = [&](const Phasor* d) {
            return Mat3(A * Vec3(d[0], d[1], d[2]).asDiagonal() * Ai);
        };
        add_block(Y, nd, net, t.from, t.from, ph(ypp));
        add_block(Y, nd, net, t.from, t.to, ph(yps));
        add_block(Y, nd, net, t.to, t.from, ph(ysp));
        add_block(Y, nd, net, t.to, t.to, ph(yss));
    }

    for (const auto& s : net.sources) add_block(Y, nd, net, s.bus, s.bus, s.z_int.inverse());

    for (const auto& ld : net.loads) {
        if (ld.model != ibrsc::LoadModel::ConstantImpedance) continue;
        for (int p = 0; p < 3; ++p)
            if (ld.phases.has(p)) {
                const int k = nd.at(net, ld.bus, p);
                Y(k, k) += std::conj(ld.s[static_cast<std::size_t>(p)]);
            }
    }
    return Y;
}

NodalPf nodal_pf(const ibrsc::NetworkModel& net, double tol, int max_iter) {
    const Eigen::MatrixXcd Y = dense_ybus(net);
    const Nodes nd(net);
    const int n = nd.n;
    const Mat3 A = synth();
    const Mat3 Ai = A.inverse();

    Eigen::VectorXcd i_src = Eigen::VectorXcd::Zero(n);
    for (const auto& s : net.sources) {
        const Vec3 e(s.e_abc[0], s.e_abc[1], s.e_abc[2]);
        const Vec3 i = s.z_int.inverse() * e;
        for (int p = 0; p < 3; ++p) i_src(nd.at(net, s.bus, p)) += i(p);
    }

    struct Pq {
        int k;
        Phasor s;
    };
    std::vector<Pq> pq;
    for (const auto& ld : net.loads)
        if (ld.model == ibrsc::LoadModel::ConstantPower)
            for (int p = 0; p < 3; ++p)
                if (ld.phases.has(p)) pq.push_back({nd.at(net, ld.bus, p), ld.s[static_cast<std::size_t>(p)]});

    std::vector<Ibr> ibrs;
    bool reference = !net.sources.empty();
    for (const auto& u : net.ibrs) {
        Ibr b{};
        const double c = u.s_rated / net.base.s_base;
        for (int p = 0; p < 3; ++p) b.v[p] = nd.at(net, u.bus, p);
        b.k_neg = c * (u.k_neg ? *u.k_neg : std::polar(0.01, -std::numbers::pi / 2.0));
        b.k_zero = c * (u.k_zero ? *u.k_zero : Phasor{});
        b.p = 3.0 * u.p_ref * c;
        b.q = 3.0 * u.q_ref * c;
        b.v_ref = u.v_ref;
        b.gfm = u.mode == ibrsc::IbrMode::GFM;
        if (b.gfm && !reference) b.slack = reference = true;
        ibrs.push_back(b);
    }
    const int m = static_cast<int>(ibrs.size());

    // Unknowns: real-split node voltages, then each IBR's positive-sequence current.
    auto ibr_abc = [&](const Ibr& b, const Eigen::VectorXcd& v, Phasor i1) {
        const Vec3 s = Ai * Vec3(v(b.v[0]), v(b.v[1]), v(b.v[2]));
        return Vec3(A * Vec3(b.k_zero * s(0), i1, b.k_neg * s(2)));
    };
    auto unpack = [&](const Eigen::VectorXd& x, Eigen::VectorXcd& v, std::vector<Phasor>& i1) {
        v.resize(n);
        for (int k = 0; k < n; ++k) v(k) = {x(2 * k), x(2 * k + 1)};
        i1.resize(static_cast<std::size_t>(m));
        for (int u = 0; u < m; ++u) i1[static_cast<std::size_t>(u)] = {x(2 * n + 2 * u), x(2 * n + 2 * u + 1)};
    };
    auto residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXcd v;
        std::vector<Phasor> i1;
        unpack(x, v, i1);
        Eigen::VectorXcd f = Y * v - i_src;
        for (const auto& l : pq) f(l.k) += std::conj(l.s / v(l.k));
        Eigen::VectorXd r(2 * n + 2 * m);
        for (int u = 0; u < m; ++u) {
            const Ibr& b = ibrs[static_cast<std::size_t>(u)];
            const Vec3 i = ibr_abc(b, v, i1[static_cast<std::size_t>(u)]);
            for (int p = 0; p < 3; ++p) f(b.v[p]) -= i(p);
            const Phasor v1 = (Ai * Vec3(v(b.v[0]), v(b.v[1]), v(b.v[2])))(1);
            const Phasor s = 3.0 * v1 * std::conj(i1[static_cast<std::size_t>(u)]);
            r(2 * n + 2 * u) = b.slack ? v1.imag() : s.real() - b.p;
            r(2 * n + 2 * u + 1) = b.gfm ? std::abs(v1) - b.v_ref : s.imag() - b.q;
        }
        for (int k = 0; k < n; ++k) {
            r(2 * k) = f(k).real();
            r(2 * k + 1) = f(k).imag();
        }
        return r;
    };

    // Start from the network with constant-power loads as impedances and the
    // IBRs switched off.
    Eigen::MatrixXcd Y0 = Y;
    for (const auto& l : pq) Y0(l.k, l.k) += std::conj(l.s);
    const Eigen::VectorXcd v0 = Y0.fullPivLu().solve(i_src);
    Eigen::VectorXd x(2 * n + 2 * m);
    for (int k = 0; k < n; ++k) {
        x(2 * k) = v0(k).real();
        x(2 * k + 1) = v0(k).imag();
    }
    for (int u = 0; u < m; ++u) {
        const Ibr& b = ibrs[static_cast<std::size_t>(u)];
        const Phasor v1 = (Ai * Vec3(v0(b.v[0]), v0(b.v[1]), v0(b.v[2])))(1);
        const Phasor i1 = std::conj(Phasor(b.p, b.gfm ? 0.0 : b.q) / (3.0 * v1));
        x(2 * n + 2 * u) = i1.real();
        x(2 * n + 2 * u + 1) = i1.imag();
    }

    NodalPf out;
    Eigen::VectorXd r = residual(x);
    const int dim = static_cast<int>(x.size());
    for (out.iterations = 0; out.iterations < max_iter && r.lpNorm<Eigen::Infinity>() > tol; ++out.iterations) {
        Eigen::MatrixXd J(dim, dim);
        for (int k = 0; k < dim; ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
            Eigen::VectorXd xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            J.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
        }
        x -= J.fullPivLu().solve(r);
        r = residual(x);
    }
    out.residual = r.lpNorm<Eigen::Infinity>();
    if (out.residual > tol) throw std::runtime_error("nodal oracle did not converge");

    Eigen::VectorXcd v;
    std::vector<Phasor> i1;
    unpack(x, v, i1);
    for (const auto& b : net.buses) {
        Vec3 vb = Vec3::Zero();
        for (int p = 0; p < 3; ++p)
            if (b.phases.has(p)) vb(p) = v(nd.at(net, b.id, p));
        out.v[b.id] = vb;
    }
    for (int u = 0; u < m; ++u)
        out.i_ibr[net.ibrs[static_cast<std::size_t>(u)].id] = ibr_abc(ibrs[static_cast<std::size_t>(u)], v, i1[static_cast<std::size_t>(u)]);
    return out;
}

}  // namespace oracle
