#include "ibrsc/scsolver.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>

#include "ibrsc/linear_solver.hpp"
#include "ibrsc/seq.hpp"
#include "ibrsc/validate.hpp"

namespace ibrsc {

ScOptions default_sc_options() {
    ScOptions o;
    o.pf = default_pf_options();
    if (const char* env = std::getenv("IBRSC_SC_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) o.tol = v;
    }
    return o;
}

Vec3 ScResult::bus_voltage(const std::string& bus) const {
    for (const auto& [id, v] : bus_voltages)
        if (id == bus) return v;
    throw InputError("unknown bus '" + bus + "'");
}

const IbrResult& ScResult::ibr(const std::string& id) const {
    for (const auto& r : ibrs)
        if (r.op.id == id) return r;
    throw InputError("unknown IBR '" + id + "'");
}

LinearizedNetwork apply_fault(const LinearizedNetwork& lin, const FaultSpec& fault) {
    const int b = lin.base.bus_index(fault.bus);
    if (b < 0) throw InputError("fault bus '" + fault.bus + "' does not exist");
    const PhaseSet need = fault_phases(fault.kind);
    if (!lin.base.buses[static_cast<std::size_t>(b)].phases.contains(need))
        throw InputError("fault " + to_string(fault.kind) + " involves a phase absent at bus '" + fault.bus + "'");
    LinearizedNetwork out = lin;
    const Mat3 y = fault_admittance(fault);
    if (!y.isZero(0.0)) out.faults.push_back({fault, y});
    return out;
}

LinearizedNetwork remove_faults(const LinearizedNetwork& lin) {
    LinearizedNetwork out = lin;
    out.faults.clear();
    return out;
}

ScContext prepare_sc(const NetworkModel& net, const PfOptions& pf) {
    require_valid(net);
    ScContext ctx;
    ctx.net = net;
    ctx.pf = solve_pf(net, pf);
    ctx.lin = linearize(net, ctx.pf);
    return ctx;
}

namespace {

Vec3 seq_vec(Phasor s0, Phasor s1, Phasor s2) { return seq::to_phase(Vec3(s0, s1, s2)); }

struct Unit {
    const IbrLinearState* pre = nullptr;
    const IbrUnit* cfg = nullptr;
    double c = 1.0;
    // Sequence voltage response (V1, V2) at the terminal per unit of own
    // converter current (I1, I2), both on the unit base.
    Eigen::Matrix2cd self = Eigen::Matrix2cd::Zero();
    // GFM port data
    std::unique_ptr<SparseSolver> port;
    Phasor z_eq;
};

/// Converter-side injection of one IBR in system pu.
Vec3 injection(const IbrOperatingPoint& op, double c) { return seq_vec(0.0, c * op.i1, c * op.i2); }

class Loop {
  public:
    Loop(const ScContext& ctx, const FaultSpec& fault, const ScOptions& opts) : ctx_(ctx), opts_(opts) {
        net_ = apply_fault(ctx.lin, fault);
        // GFM sources become converter-current injections; the rhs is rebuilt
        // from the operating points every iteration.
        std::erase_if(net_.seq_sources, [&](const SequenceSource& s) { return !s.owner.empty(); });
        std::erase_if(net_.injections, [&](const CurrentInjection& s) { return !s.owner.empty(); });
        const ManaSystem sys = assemble_ss(net_);
        index_ = sys.index;
        a_ = sys.matrix;
        base_rhs_ = sys.rhs;
        solver_.factorize(a_);

        for (const auto& st : ctx.lin.ibrs) {
            Unit u;
            u.pre = &st;
            u.cfg = &ctx.net.ibr(st.id);
            u.c = st.scale;
            units_.push_back(std::move(u));
        }
        for (auto& u : units_) {
            for (int s = 1; s <= 2; ++s) {
                Eigen::VectorXd probe = Eigen::VectorXd::Zero(index_.size());
                add_bus_current(probe, u.pre->bus, seq_vec(0.0, s == 1 ? 1.0 : 0.0, s == 2 ? 1.0 : 0.0));
                const Vec3 v = seq::to_sequence(ss_bus_voltage(net_, index_, solver_.solve(probe), u.pre->bus));
                u.self(0, s - 1) = u.c * v(1);
                u.self(1, s - 1) = u.c * v(2);
            }
        }
        for (auto& u : units_) {
            if (u.pre->mode != IbrMode::GFM) continue;
            LinearizedNetwork port = net_;
            std::erase_if(port.shunts, [&](const ShuntElement& s) { return s.owner == u.pre->id && s.role == ShuntRole::IbrFilter; });
            const ManaSystem ps = assemble_ss(port);
            u.port = std::make_unique<SparseSolver>(ps.matrix);
            Eigen::VectorXd probe = Eigen::VectorXd::Zero(index_.size());
            add_bus_current(probe, u.pre->bus, seq_vec(0.0, 1.0, 0.0));
            u.z_eq = positive_sequence(u.port->solve(probe), u.pre->bus);
        }
    }

    ScResult run(const FaultSpec& fault) {
        ScResult res;
        res.fault = fault;
        res.pf_iterations = ctx_.pf.iterations;
        std::vector<IbrOperatingPoint> ops;
        for (const auto& u : units_) ops.push_back(prefault_point(*u.pre, *u.cfg));

        Eigen::VectorXd x = solve(ops);
        measure(x, ops);
        res.trajectory.push_back(ops);
        if (units_.empty()) {
            res.converged = true;
            res.iterations = 1;
            finish(res, x, ops);
            return res;
        }

        double lambda = 1.0;
        Eigen::VectorXd prev_step;
        for (int n = 1; n <= opts_.max_iter; ++n) {
            std::vector<IbrOperatingPoint> next(ops.size());
            for (std::size_t k = 0; k < units_.size(); ++k) {
                next[k] = local_step(k, ops);
                if (lambda < 1.0) {
                    next[k].i1 = lambda * next[k].i1 + (1.0 - lambda) * ops[k].i1;
                    next[k].i2 = lambda * next[k].i2 + (1.0 - lambda) * ops[k].i2;
                }
            }
            const Eigen::VectorXd xn = solve(next);
            std::vector<IbrOperatingPoint> measured = next;
            measure(xn, measured);

            double worst = 0.0;
            Eigen::VectorXd step(4 * static_cast<Eigen::Index>(units_.size()));
            for (std::size_t k = 0; k < units_.size(); ++k) {
                const Phasor d1 = measured[k].v1_lv - ops[k].v1_lv;
                const Phasor d2 = measured[k].v2_lv - ops[k].v2_lv;
                res.trace.push_back({n, units_[k].pre->id, std::abs(d1), std::abs(d2)});
                worst = std::max({worst, std::abs(d1), std::abs(d2)});
                const auto e = static_cast<Eigen::Index>(4 * k);
                step.segment(e, 4) << d1.real(), d1.imag(), d2.real(), d2.imag();
            }
            // Damp only a persistent oscillation: the update reverses direction
            // without shrinking.
            if (prev_step.size() == step.size() && lambda == 1.0 && step.dot(prev_step) < 0.0 &&
                step.norm() > 0.5 * prev_step.norm())
                lambda = 0.5;
            prev_step = step;
            ops = std::move(measured);
            x = xn;
            res.trajectory.push_back(ops);
            res.iterations = n;
            res.damping = lambda;
            if (worst < opts_.tol) {
                res.converged = true;
                break;
            }
        }
        finish(res, x, ops);
        if (!res.converged) {
            res.message = "short-circuit loop did not converge in " + std::to_string(opts_.max_iter) + " iterations";
            ConvergenceDiagnostics d;
            d.iterations = res.iterations;
            for (const auto& t : res.trace)
                if (t.iter == res.iterations) d.final_norm = std::max({d.final_norm, t.dv1, t.dv2});
            std::vector<double> hist(static_cast<std::size_t>(res.iterations), 0.0);
            for (const auto& t : res.trace) {
                auto& h = hist[static_cast<std::size_t>(t.iter - 1)];
                if (std::max(t.dv1, t.dv2) >= h) {
                    h = std::max(t.dv1, t.dv2);
                    if (t.iter == res.iterations) d.worst_row = "IBR " + t.ibr;
                }
            }
            d.history = std::move(hist);
            auto shared = std::make_shared<const ScResult>(res);
            throw ScNonConvergence(res.message, std::move(d), std::move(shared));
        }
        return res;
    }

  private:
    /// Limiter update of unit k from the last network solution. The unit's own
    /// influence on its terminal voltage is resolved locally through `self`
    /// (and the GFM droop through its Thevenin port), so the outer Jacobi loop
    /// only carries the coupling between units.
    IbrOperatingPoint local_step(std::size_t k, const std::vector<IbrOperatingPoint>& ops) const {
        const Unit& u = units_[k];
        const IbrOperatingPoint& meas = ops[k];
        const Eigen::Vector2cd v0(meas.v1_lv, meas.v2_lv);
        const Eigen::Vector2cd i0(meas.i1, meas.i2);
        std::optional<TheveninIbr> th;
        if (u.pre->mode == IbrMode::GFM) {
            const Thevenin t = thevenin(k, ops);
            th = TheveninIbr{t.z_eq * u.c, t.v_eq};
        }
        IbrOperatingPoint in = meas, out;
        for (int it = 0; it < kLocalIterations; ++it) {
            out = th ? vic_step(in, *th, *u.pre, *u.cfg) : gfl_step(in, *u.pre, *u.cfg);
            const Eigen::Vector2cd v = v0 + u.self * (Eigen::Vector2cd(out.i1, out.i2) - i0);
            double change = std::max(std::abs(v(0) - in.v1_lv), std::abs(v(1) - in.v2_lv));
            in.v1_lv = v(0);
            in.v2_lv = v(1);
            if (th) {
                change = std::max(change, std::abs(out.e1 - in.e1));
                in.e1 = out.e1;
            }
            if (change < kLocalTol) break;
        }
        out.v1_lv = meas.v1_lv;
        out.v2_lv = meas.v2_lv;
        return out;
    }

    static constexpr int kLocalIterations = 50;
    static constexpr double kLocalTol = 1e-13;

    void add_bus_current(Eigen::VectorXd& rhs, const std::string& bus, const Vec3& i) const {
        const PhaseSet ph = net_.base.bus(bus).phases;
        for (int p = 0; p < 3; ++p)
            if (ph.has(p)) add_complex_to(rhs, index_.slot(Block::NodeVoltage, bus, phase_label(p)), i(p));
    }

    Phasor positive_sequence(const Eigen::VectorXd& x, const std::string& bus) const {
        return seq::to_sequence(ss_bus_voltage(net_, index_, x, bus))(1);
    }

    Eigen::VectorXd rhs_for(const std::vector<IbrOperatingPoint>& ops, int skip) const {
        Eigen::VectorXd b = base_rhs_;
        for (std::size_t k = 0; k < units_.size(); ++k)
            if (static_cast<int>(k) != skip) add_bus_current(b, units_[k].pre->bus, injection(ops[k], units_[k].c));
        return b;
    }

    Eigen::VectorXd solve(const std::vector<IbrOperatingPoint>& ops) const { return solver_.solve(rhs_for(ops, -1)); }

    /// v_eq at GFM k: other units at their latest injections, own I1,LV = 0
    /// and own I2,LV applied. z_eq was probed once at construction.
    Thevenin thevenin(std::size_t k, const std::vector<IbrOperatingPoint>& ops) const {
        const Unit& u = units_[k];
        Eigen::VectorXd b = rhs_for(ops, static_cast<int>(k));
        add_bus_current(b, u.pre->bus, seq_vec(0.0, 0.0, u.c * ops[k].i2_lv));
        return {u.z_eq, positive_sequence(u.port->solve(b), u.pre->bus)};
    }

    void measure(const Eigen::VectorXd& x, std::vector<IbrOperatingPoint>& ops) const {
        for (std::size_t k = 0; k < units_.size(); ++k) {
            const Vec3 v012 = seq::to_sequence(ss_bus_voltage(net_, index_, x, units_[k].pre->bus));
            ops[k].v0_lv = v012(0);
            ops[k].v1_lv = v012(1);
            ops[k].v2_lv = v012(2);
        }
    }

    void finish(ScResult& res, const Eigen::VectorXd& x, const std::vector<IbrOperatingPoint>& ops) const {
        for (const auto& b : net_.base.buses) res.bus_voltages.emplace_back(b.id, ss_bus_voltage(net_, index_, x, b.id));
        for (const auto& f : net_.faults) res.fault_current += f.y * ss_bus_voltage(net_, index_, x, f.spec.bus);
        for (const auto& br : net_.base.branches) {
            BranchCurrent bc;
            bc.id = br.id;
            const Vec3 vf = ss_bus_voltage(net_, index_, x, br.from);
            const Vec3 vt = ss_bus_voltage(net_, index_, x, br.to);
            std::vector<int> ph;
            for (int p = 0; p < 3; ++p)
                if (br.phases.has(p)) ph.push_back(p);
            const auto n = static_cast<Eigen::Index>(ph.size());
            Eigen::MatrixXcd z(n, n), ys(n, n);
            Eigen::VectorXcd a(n), b(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                a(i) = vf(ph[static_cast<std::size_t>(i)]);
                b(i) = vt(ph[static_cast<std::size_t>(i)]);
                for (Eigen::Index j = 0; j < n; ++j) {
                    z(i, j) = br.z_abc(ph[static_cast<std::size_t>(i)], ph[static_cast<std::size_t>(j)]);
                    ys(i, j) = 0.5 * br.y_shunt_abc(ph[static_cast<std::size_t>(i)], ph[static_cast<std::size_t>(j)]);
                }
            }
            const Eigen::VectorXcd series = z.inverse() * (a - b);
            const Eigen::VectorXcd i_from = series + ys * a;
            const Eigen::VectorXcd i_to = -series + ys * b;
            for (Eigen::Index i = 0; i < n; ++i) {
                bc.i_from(ph[static_cast<std::size_t>(i)]) = i_from(i);
                bc.i_to(ph[static_cast<std::size_t>(i)]) = i_to(i);
            }
            res.branch_currents.push_back(bc);
        }
        for (std::size_t k = 0; k < units_.size(); ++k) {
            const auto& u = units_[k];
            IbrResult r;
            r.op = ops[k];
            r.scale = u.c;
            r.i_abc = seq_vec(0.0, ops[k].i1, ops[k].i2);
            r.i_abc_lv = seq_vec(u.pre->k_zero * ops[k].v0_lv, ops[k].i1_lv, ops[k].i2_lv);
            r.dv1_lv = ops[k].v1_lv - u.pre->v1_pre;
            r.dv2_lv = ops[k].v2_lv - u.pre->v2_pre;
            res.ibrs.push_back(r);
        }
        const Eigen::VectorXd b = rhs_for(ops, -1);
        res.kcl_residual = (a_ * x - b).lpNorm<Eigen::Infinity>();
    }

    const ScContext& ctx_;
    ScOptions opts_;
    LinearizedNetwork net_;
    IndexMap index_;
    Eigen::SparseMatrix<double> a_;
    Eigen::VectorXd base_rhs_;
    SparseSolver solver_;
    std::vector<Unit> units_;
};

}  // namespace

ScResult solve_sc(const ScContext& ctx, const FaultSpec& fault, const ScOptions& opts) {
    Loop loop(ctx, fault, opts);
    return loop.run(fault);
}

ScResult solve_sc(const NetworkModel& net, const FaultSpec& fault, const ScOptions& opts) {
    const ScContext ctx = prepare_sc(net, opts.pf);
    return solve_sc(ctx, fault, opts);
}

}  // namespace ibrsc
