#include <cmath>
#include <cstdlib>

#include <Eigen/SparseLU>

#include "element_stamps.hpp"
#include "ibrsc/mana.hpp"

namespace ibrsc {

PfOptions default_pf_options() {
    PfOptions o;
    if (const char* env = std::getenv("IBRSC_PF_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) o.tol = v;
    }
    return o;
}

namespace {

struct NewtonOutcome {
    Eigen::VectorXd x;
    int iterations = 0;
    double norm = 0.0;
    bool converged = false;
    int worst = -1;
};

int worst_row(const Eigen::VectorXd& f) {
    Eigen::Index k = 0;
    f.cwiseAbs().maxCoeff(&k);
    return static_cast<int>(k);
}

NewtonOutcome newton(const PfEquations& eq, Eigen::VectorXd x, const PfOptions& opts, std::vector<double>& history) {
    NewtonOutcome out;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    Eigen::VectorXd f = eq.residual(x);
    for (int it = 0;; ++it) {
        out.norm = f.size() ? f.lpNorm<Eigen::Infinity>() : 0.0;
        history.push_back(out.norm);
        if (!std::isfinite(out.norm)) {
            out.iterations = it;
            break;
        }
        if (out.norm < opts.tol) {
            out.converged = true;
            out.iterations = it;
            // One polishing step; kept only when it does not hurt.
            if (out.norm > 0.0) {
                const auto J = eq.jacobian(x);
                if (!analyzed) lu.analyzePattern(J);
                lu.factorize(J);
                if (lu.info() == Eigen::Success) {
                    Eigen::VectorXd xp = x - lu.solve(f);
                    Eigen::VectorXd fp = eq.residual(xp);
                    if (fp.allFinite() && fp.lpNorm<Eigen::Infinity>() <= out.norm) {
                        x = std::move(xp);
                        f = std::move(fp);
                        out.norm = f.lpNorm<Eigen::Infinity>();
                    }
                }
            }
            break;
        }
        if (it >= opts.max_iter) {
            out.iterations = it;
            break;
        }
        const auto J = eq.jacobian(x);
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) {
            out.iterations = it;
            break;
        }
        x -= lu.solve(f);
        f = eq.residual(x);
    }
    out.worst = f.size() ? worst_row(f) : -1;
    out.x = std::move(x);
    return out;
}

[[noreturn]] void fail(const PfEquations& eq, const NewtonOutcome& o, std::vector<double> history) {
    ConvergenceDiagnostics d;
    d.iterations = o.iterations;
    d.final_norm = o.norm;
    d.worst_row = o.worst >= 0 ? eq.index().slot_name(o.worst) : "";
    d.history = std::move(history);
    const std::string msg = "power flow did not converge after " + std::to_string(o.iterations) +
                            " iterations (residual " + std::to_string(o.norm) + ", worst row " + d.worst_row + ")";
    throw NonConvergence(msg, std::move(d));
}

}  // namespace

PfSolution solve_pf(const NetworkModel& net, const PfOptions& opts) {
    PfEquations eq(net);
    Eigen::VectorXd x0 = eq.flat_start();
    if (opts.start == StartMode::Warm && opts.warm) {
        if (opts.warm->size() != eq.size()) throw InputError("warm start vector has the wrong size");
        x0 = *opts.warm;
    }
    std::vector<double> history;
    NewtonOutcome o = newton(eq, x0, opts, history);
    if (!o.converged) fail(eq, o, history);
    int total = o.iterations;

    PfSolution sol;
    if (!net.regulators.empty() && opts.round_taps) {
        std::vector<std::array<double, 3>> taps;
        for (const auto& rg : net.regulators) {
            std::array<double, 3> t{};
            const int g = eq.index().slot(Block::RegulatorTap, rg.id, "g.A");
            for (int p = 0; p < 3; ++p) {
                const double steps = std::round((o.x[g + p] - 1.0) / rg.step);
                t[static_cast<std::size_t>(p)] = std::clamp(1.0 + steps * rg.step, rg.tap_min, rg.tap_max);
            }
            taps.push_back(t);
        }
        PfEquations fixed(net, taps);
        Eigen::VectorXd xw = o.x;
        for (std::size_t r = 0; r < taps.size(); ++r) {
            const int g = fixed.index().slot(Block::RegulatorTap, net.regulators[r].id, "g.A");
            for (int p = 0; p < 3; ++p) xw[g + p] = taps[r][static_cast<std::size_t>(p)];
        }
        o = newton(fixed, xw, opts, history);
        if (!o.converged) fail(fixed, o, history);
        total += o.iterations;
    }
    sol.index = eq.index();
    sol.x = o.x;
    sol.iterations = total;
    sol.residual_norm = o.norm;
    sol.history = std::move(history);
    return sol;
}

Phasor PfSolution::value(Block b, const std::string& element, const std::string& label) const {
    return get_complex(x, index.slot(b, element, label));
}

Phasor PfSolution::voltage(const std::string& bus, int phase) const {
    const int s = index.find(Block::NodeVoltage, bus, phase_label(phase));
    return s < 0 ? Phasor{} : get_complex(x, s);
}

Vec3 PfSolution::bus_voltage(const std::string& bus) const {
    Vec3 v;
    for (int p = 0; p < 3; ++p) v(p) = voltage(bus, p);
    return v;
}

Vec3 PfSolution::ibr_current(const std::string& ibr) const {
    Vec3 i;
    for (int p = 0; p < 3; ++p) i(p) = value(Block::IbrCurrent, ibr, "I." + phase_label(p));
    return i;
}

Phasor PfSolution::emf(const std::string& generator) const { return value(Block::InternalEmf, generator, "E"); }

double PfSolution::tap(const std::string& regulator, int phase) const {
    return x[index.slot(Block::RegulatorTap, regulator, "g." + phase_label(phase))];
}

PowerBalance power_balance(const NetworkModel& net, const PfSolution& pf) {
    PowerBalance pb;
    const auto& x = pf.x;
    NodeMap nodes(net);
    auto node_power = [&](const Stamper& s) {
        // Power flowing from the nodes into the stamped element.
        Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
        s.multiply_add(x, y);
        Phasor total{};
        for (int n = 0; n < nodes.size(); ++n) {
            const int v = voltage_slot(n);
            total += get_complex(x, v) * std::conj(get_complex(y, v));
        }
        return total;
    };
    Stamper s(pf.index.size());
    Eigen::VectorXd unused = Eigen::VectorXd::Zero(x.size());
    for (const auto& br : net.branches) detail::stamp_branch(s, nodes, br);
    for (const auto& t : net.transformers)
        detail::stamp_transformer(s, nodes, t, pf.index.slot(Block::TransformerCurrent, t.id, "I0"));
    for (const auto& sw : net.switches) detail::stamp_switch(s, nodes, sw, pf.index);
    pb.losses += node_power(s);
    for (const auto& rg : net.regulators) {
        for (int p = 0; p < 3; ++p) {
            const Phasor i = pf.value(Block::TransformerCurrent, rg.id, "I." + phase_label(p));
            const double g = pf.tap(rg.id, p);
            pb.losses += pf.voltage(rg.from, p) * std::conj(i) - pf.voltage(rg.to, p) * std::conj(i / g);
        }
    }

    for (const auto& src : net.sources)
        for (int p = 0; p < 3; ++p)
            pb.generation += pf.voltage(src.bus, p) * std::conj(pf.value(Block::SourceCurrent, src.id, "I." + phase_label(p)));
    for (const auto& g : net.generators)
        for (int p = 0; p < 3; ++p)
            pb.generation += pf.voltage(g.bus, p) * std::conj(pf.value(Block::GeneratorCurrent, g.id, "I." + phase_label(p)));
    for (const auto& u : net.ibrs) {
        const Vec3 i = pf.ibr_current(u.id);
        for (int p = 0; p < 3; ++p) pb.generation += pf.voltage(u.bus, p) * std::conj(i(p));
    }
    for (const auto& ld : net.loads) {
        for (int p = 0; p < 3; ++p) {
            if (!ld.phases.has(p)) continue;
            const Phasor v = pf.voltage(ld.bus, p);
            if (ld.model == LoadModel::ConstantImpedance)
                pb.load += v * std::conj(std::conj(ld.s[static_cast<std::size_t>(p)]) * v);
            else
                pb.load += v * std::conj(pf.value(Block::LoadCurrent, ld.id, "I." + phase_label(p)));
        }
    }
    pb.mismatch = std::abs(pb.generation - pb.load - pb.losses);
    return pb;
}

}  // namespace ibrsc
