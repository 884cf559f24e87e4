#include "ibrsc/validate.hpp"

#include <numeric>
#include <set>
#include <sstream>

#include "ibrsc/errors.hpp"

namespace ibrsc {

namespace {

class DisjointSet {
  public:
    explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            auto& p = parent_[static_cast<std::size_t>(x)];
            p = parent_[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }
    /// False when both were already joined.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[static_cast<std::size_t>(b)] = a;
        return true;
    }

  private:
    std::vector<int> parent_;
};

std::string phases_str(PhaseSet s) {
    std::string out;
    for (int p = 0; p < 3; ++p)
        if (s.has(p)) out += phase_letter(p);
    return out.empty() ? "-" : out;
}

class Checker {
  public:
    explicit Checker(const NetworkModel& net) : net_(net) {}

    void error(IssueCategory c, const std::string& subject, const std::string& msg) {
        report_.issues.push_back({Severity::Error, c, subject, msg});
    }

    /// Returns the bus index or -1 after recording a dangling reference.
    int ref(const std::string& owner, const std::string& bus) {
        const int b = net_.bus_index(bus);
        if (b < 0) error(IssueCategory::DanglingReference, owner, "references missing bus '" + bus + "'");
        return b;
    }

    void need_phases(const std::string& owner, int bus, PhaseSet want) {
        if (bus < 0) return;
        const PhaseSet have = net_.buses[static_cast<std::size_t>(bus)].phases;
        if (!have.contains(want))
            error(IssueCategory::PhaseMismatch, owner,
                  "needs phases " + phases_str(want) + " at bus '" + net_.buses[static_cast<std::size_t>(bus)].id +
                      "' which has " + phases_str(have));
    }

    template <typename Range>
    void unique_ids(const Range& items, const char* kind) {
        std::set<std::string> seen;
        for (const auto& it : items)
            if (!seen.insert(it.id).second)
                error(IssueCategory::DuplicateId, it.id, std::string("duplicate ") + kind + " id");
    }

    ValidationReport run();

  private:
    const NetworkModel& net_;
    ValidationReport report_;
};

bool invertible_on(const Mat3& z, PhaseSet ph) {
    std::vector<int> idx;
    for (int p = 0; p < 3; ++p)
        if (ph.has(p)) idx.push_back(p);
    Eigen::MatrixXcd sub(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z(idx[i], idx[j]);
    if (idx.empty()) return false;
    const double scale = sub.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(sub / scale);
    lu.setThreshold(1e-12);
    return lu.isInvertible();
}

ValidationReport Checker::run() {
    unique_ids(net_.buses, "bus");
    unique_ids(net_.branches, "branch");
    unique_ids(net_.transformers, "transformer");
    unique_ids(net_.regulators, "regulator");
    unique_ids(net_.loads, "load");
    unique_ids(net_.sources, "source");
    unique_ids(net_.generators, "generator");
    unique_ids(net_.switches, "switch");
    unique_ids(net_.ibrs, "ibr");

    for (const auto& b : net_.buses) {
        if (b.phases.empty()) error(IssueCategory::InvalidParameter, b.id, "bus has no phases");
        if (!(b.base_kv > 0.0)) error(IssueCategory::InvalidParameter, b.id, "base_kv must be positive");
    }

    for (const auto& br : net_.branches) {
        const int f = ref(br.id, br.from), t = ref(br.id, br.to);
        need_phases(br.id, f, br.phases);
        need_phases(br.id, t, br.phases);
        if (!invertible_on(br.z_abc, br.phases))
            error(IssueCategory::ZeroImpedanceLoop, br.id, "series impedance is singular on its phases");
    }
    for (const auto& tr : net_.transformers) {
        const int f = ref(tr.id, tr.from), t = ref(tr.id, tr.to);
        need_phases(tr.id, f, PhaseSet::abc());
        need_phases(tr.id, t, PhaseSet::abc());
        if (!(tr.tap > 0.0)) error(IssueCategory::InvalidParameter, tr.id, "tap must be positive");
        if (!(std::abs(tr.z_leak) > 0.0)) error(IssueCategory::InvalidParameter, tr.id, "leakage impedance must be nonzero");
        if (tr.z0_path && !(std::abs(*tr.z0_path) > 0.0))
            error(IssueCategory::InvalidParameter, tr.id, "zero-sequence impedance must be nonzero");
    }
    for (const auto& rg : net_.regulators) {
        const int f = ref(rg.id, rg.from), t = ref(rg.id, rg.to);
        need_phases(rg.id, f, PhaseSet::abc());
        need_phases(rg.id, t, PhaseSet::abc());
        if (!(rg.tap_min > 0.0 && rg.tap_max >= rg.tap_min && rg.step > 0.0))
            error(IssueCategory::InvalidParameter, rg.id, "invalid tap range");
    }
    for (const auto& ld : net_.loads) need_phases(ld.id, ref(ld.id, ld.bus), ld.phases);
    for (const auto& s : net_.sources) need_phases(s.id, ref(s.id, s.bus), PhaseSet::abc());
    for (const auto& g : net_.generators) {
        need_phases(g.id, ref(g.id, g.bus), PhaseSet::abc());
        if (!(std::abs(g.z_machine) > 0.0)) error(IssueCategory::InvalidParameter, g.id, "machine impedance must be nonzero");
    }
    for (const auto& sw : net_.switches) {
        const int f = ref(sw.id, sw.from), t = ref(sw.id, sw.to);
        need_phases(sw.id, f, sw.phases);
        need_phases(sw.id, t, sw.phases);
    }
    for (const auto& u : net_.ibrs) {
        need_phases(u.id, ref(u.id, u.bus), PhaseSet::abc());
        if (!(u.i_max > 0.0)) error(IssueCategory::InvalidParameter, u.id, "i_max must be positive");
        if (!(u.s_rated > 0.0)) error(IssueCategory::InvalidParameter, u.id, "s_rated must be positive");
        if (!(u.phi >= 0.0)) error(IssueCategory::InvalidParameter, u.id, "phi must be non-negative");
        if (u.kappa && !(*u.kappa >= 0.0 && *u.kappa < u.i_max))
            error(IssueCategory::InvalidParameter, u.id, "kappa must lie in [0, i_max)");
        if (u.z_filter && !(std::abs(*u.z_filter) > 0.0))
            error(IssueCategory::InvalidParameter, u.id, "filter impedance must be nonzero");
    }

    if (!report_.ok()) return report_;

    // Loops of closed switches, and ideal sources tied together by them.
    NodeMap nodes(net_);
    DisjointSet sw_set(static_cast<std::size_t>(nodes.size()));
    for (const auto& sw : net_.switches) {
        for (int p = 0; p < 3; ++p) {
            if (!sw.phases.has(p) || !sw.closed[static_cast<std::size_t>(p)]) continue;
            if (!sw_set.unite(nodes.node(sw.from, p), nodes.node(sw.to, p)))
                error(IssueCategory::ZeroImpedanceLoop, sw.id,
                      std::string("closed switch phase ") + phase_letter(p) + " closes a zero-impedance loop");
        }
    }
    std::map<int, std::string> stiff;
    for (const auto& s : net_.sources) {
        if (!s.z_int.isZero(0.0)) continue;
        for (int p = 0; p < 3; ++p) {
            const int root = sw_set.find(nodes.node(s.bus, p));
            auto [it, fresh] = stiff.emplace(root, s.id);
            if (!fresh)
                error(IssueCategory::ZeroImpedanceLoop, s.id, "ideal source is shorted to ideal source '" + it->second + "'");
        }
    }

    int n_islands = 0;
    const auto island = bus_islands(net_, &n_islands);
    std::vector<bool> referenced(static_cast<std::size_t>(n_islands), false);
    for (const auto& s : net_.sources) referenced[static_cast<std::size_t>(island[static_cast<std::size_t>(net_.bus_index(s.bus))])] = true;
    for (const auto& u : net_.ibrs)
        if (u.mode == IbrMode::GFM) referenced[static_cast<std::size_t>(island[static_cast<std::size_t>(net_.bus_index(u.bus))])] = true;
    for (int k = 0; k < n_islands; ++k) {
        if (referenced[static_cast<std::size_t>(k)]) continue;
        std::string members;
        for (std::size_t b = 0; b < net_.buses.size(); ++b)
            if (island[b] == k) members += (members.empty() ? "" : ",") + net_.buses[b].id;
        error(IssueCategory::NoReferenceSource, members, "island {" + members + "} has no reference source (ideal source or GFM)");
    }
    return report_;
}

}  // namespace

std::vector<int> bus_islands(const NetworkModel& net, int* island_count) {
    DisjointSet ds(net.buses.size());
    auto join = [&](const std::string& a, const std::string& b) {
        const int ia = net.bus_index(a), ib = net.bus_index(b);
        if (ia >= 0 && ib >= 0) ds.unite(ia, ib);
    };
    for (const auto& br : net.branches) join(br.from, br.to);
    for (const auto& tr : net.transformers) join(tr.from, tr.to);
    for (const auto& rg : net.regulators) join(rg.from, rg.to);
    for (const auto& sw : net.switches) {
        bool any = false;
        for (int p = 0; p < 3; ++p) any = any || (sw.phases.has(p) && sw.closed[static_cast<std::size_t>(p)]);
        if (any) join(sw.from, sw.to);
    }
    std::map<int, int> label;
    std::vector<int> out(net.buses.size());
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
        const int r = ds.find(static_cast<int>(b));
        auto [it, fresh] = label.emplace(r, static_cast<int>(label.size()));
        out[b] = it->second;
    }
    if (island_count) *island_count = static_cast<int>(label.size());
    return out;
}

bool ValidationReport::ok() const {
    for (const auto& i : issues)
        if (i.severity == Severity::Error) return false;
    return true;
}

bool ValidationReport::has(IssueCategory c) const {
    for (const auto& i : issues)
        if (i.category == c) return true;
    return false;
}

std::string to_string(IssueCategory c) {
    switch (c) {
        case IssueCategory::DuplicateId: return "duplicate-id";
        case IssueCategory::DanglingReference: return "dangling-reference";
        case IssueCategory::PhaseMismatch: return "phase-mismatch";
        case IssueCategory::InvalidParameter: return "invalid-parameter";
        case IssueCategory::ZeroImpedanceLoop: return "zero-impedance-loop";
        case IssueCategory::NoReferenceSource: return "no-reference-source";
    }
    return "unknown";
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& i : issues)
        os << (i.severity == Severity::Error ? "error" : "warning") << " [" << to_string(i.category) << "] " << i.subject
           << ": " << i.message << "\n";
    return os.str();
}

void require_valid(const NetworkModel& net) {
    const auto rep = validate(net);
    if (!rep.ok()) throw InputError("network validation failed:\n" + rep.summary());
}

ValidationReport validate(const NetworkModel& net) { return Checker(net).run(); }

}  // namespace ibrsc
