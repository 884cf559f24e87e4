#include "ibrsc/errors.hpp"
#include "ibrsc/io.hpp"
#include "ibrsc/validate.hpp"
#include "json_reader.hpp"

namespace ibrsc {

using detail::complex_json;
using detail::LineIndex;
using detail::Node;
using detail::ojson;

namespace {

PhaseSet parse_phases(const Node& n) {
    const std::string s = n.string();
    PhaseSet ph;
    for (char c : s) {
        const int p = std::toupper(static_cast<unsigned char>(c)) - 'A';
        if (p < 0 || p > 2 || ph.has(p)) n.fail("bad phase list '" + s + "'");
        ph.set(p);
    }
    if (ph.empty()) n.fail("empty phase list");
    return ph;
}

PhaseSet phases_or_abc(const Node& n) { return n.has("phases") ? parse_phases(n.at("phases")) : PhaseSet::abc(); }

std::string phases_text(PhaseSet ph) {
    std::string s;
    for (int p = 0; p < 3; ++p)
        if (ph.has(p)) s.push_back(phase_letter(p));
    return s;
}

std::vector<int> active(PhaseSet ph) {
    std::vector<int> v;
    for (int p = 0; p < 3; ++p)
        if (ph.has(p)) v.push_back(p);
    return v;
}

/// n x n matrix over the active phases, {"z1", "z0"} sequence form, or a
/// scalar applied to the diagonal.
Mat3 parse_matrix(const Node& n, PhaseSet ph) {
    const auto idx = active(ph);
    Mat3 m = Mat3::Zero();
    if (n.raw().is_object() && (n.has("z1") || n.has("z0") || n.has("y1") || n.has("y0"))) {
        n.only({"z1", "z0", "y1", "y0"});
        const bool y = n.has("y1");
        const Phasor s1 = n.at(y ? "y1" : "z1").complex();
        const Phasor s0 = n.has(y ? "y0" : "z0") ? n.at(y ? "y0" : "z0").complex() : s1;
        const Mat3 full = phase_matrix_from_sequence_impedance(s1, s0);
        for (int i : idx)
            for (int j : idx) m(i, j) = full(i, j);
        return m;
    }
    if (n.raw().is_array() && n.size() > 0 && n.raw()[0].is_array() && n.raw()[0].size() > 0 &&
        !n.raw()[0][0].is_number()) {
        if (n.size() != idx.size()) n.fail("matrix must be " + std::to_string(idx.size()) + "x" + std::to_string(idx.size()));
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const Node row = n[r];
            if (row.size() != idx.size()) row.fail("row must have " + std::to_string(idx.size()) + " entries");
            for (std::size_t c = 0; c < idx.size(); ++c) m(idx[r], idx[c]) = row[c].complex();
        }
        return m;
    }
    const Phasor d = n.complex();
    for (int i : idx) m(i, i) = d;
    return m;
}

ojson matrix_json(const Mat3& m, PhaseSet ph) {
    const auto idx = active(ph);
    ojson out = ojson::array();
    for (int i : idx) {
        ojson row = ojson::array();
        for (int j : idx) row.push_back(complex_json(m(i, j)));
        out.push_back(row);
    }
    return out;
}

Winding parse_winding(const Node& n) {
    const std::string s = n.string();
    if (s == "Yg" || s == "YG" || s == "yg") return Winding::WyeGrounded;
    if (s == "Y" || s == "y") return Winding::Wye;
    if (s == "D" || s == "d" || s == "Delta") return Winding::Delta;
    n.fail("unknown winding '" + s + "' (Yg, Y or D)");
}

const char* winding_text(Winding w) {
    switch (w) {
        case Winding::WyeGrounded: return "Yg";
        case Winding::Wye: return "Y";
        case Winding::Delta: return "D";
    }
    return "Yg";
}

std::array<Phasor, 3> parse_phase_triple(const Node& n, PhaseSet ph) {
    std::array<Phasor, 3> out{};
    const auto idx = active(ph);
    if (n.size() == 3) {
        for (std::size_t i = 0; i < 3; ++i) out[i] = n[i].complex();
    } else if (n.size() == idx.size()) {
        for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<std::size_t>(idx[i])] = n[i].complex();
    } else {
        n.fail("expected 3 or " + std::to_string(idx.size()) + " entries");
    }
    return out;
}

class NetworkReader {
  public:
    NetworkReader(const Node& root) : root_(root) {}

    NetworkModel read() {
        root_.only({"schema_version", "name", "s_base_mva", "impedance_unit", "buses", "branches", "transformers",
                    "regulators", "loads", "sources", "generators", "switches", "ibrs"});
        const Node ver = root_.at("schema_version");
        if (ver.integer() != kSchemaVersion)
            ver.fail("unsupported schema version " + std::to_string(ver.integer()) + " (expected " +
                     std::to_string(kSchemaVersion) + ")");
        net_.name = root_.string_or("name", "");
        net_.base.s_base = root_.number_or("s_base_mva", 1.0);
        if (!(net_.base.s_base > 0.0)) root_.at("s_base_mva").fail("must be positive");
        const std::string unit = root_.string_or("impedance_unit", "pu");
        if (unit != "pu" && unit != "ohm") root_.at("impedance_unit").fail("must be \"pu\" or \"ohm\"");
        ohm_ = unit == "ohm";

        each("buses", [&](const Node& n) { read_bus(n); });
        each("branches", [&](const Node& n) { read_branch(n); });
        each("transformers", [&](const Node& n) { read_transformer(n); });
        each("regulators", [&](const Node& n) { read_regulator(n); });
        each("loads", [&](const Node& n) { read_load(n); });
        each("sources", [&](const Node& n) { read_source(n); });
        each("generators", [&](const Node& n) { read_generator(n); });
        each("switches", [&](const Node& n) { read_switch(n); });
        each("ibrs", [&](const Node& n) { read_ibr(n); });
        return std::move(net_);
    }

  private:
    template <typename F>
    void each(const char* key, F&& f) {
        const auto arr = root_.find(key);
        if (!arr) return;
        for (std::size_t i = 0; i < arr->size(); ++i) f((*arr)[i]);
    }

    double kv_of(const Node& n, const char* key) const {
        const Node b = n.at(key);
        const int i = net_.bus_index(b.string());
        if (i < 0) b.fail("unknown bus '" + b.string() + "'");
        return net_.buses[static_cast<std::size_t>(i)].base_kv;
    }

    /// Impedance scale to per-unit (1 when the file is already per-unit).
    double z_scale(const Node& n, const char* bus_key) const { return ohm_ ? 1.0 / net_.base.z_base(kv_of(n, bus_key)) : 1.0; }

    void read_bus(const Node& n) {
        n.only({"id", "phases", "base_kv"});
        Bus b;
        b.id = n.at("id").string();
        b.phases = phases_or_abc(n);
        b.base_kv = n.number_or("base_kv", 1.0);
        if (!(b.base_kv > 0.0)) n.at("base_kv").fail("must be positive");
        net_.buses.push_back(b);
    }

    void read_branch(const Node& n) {
        n.only({"id", "from", "to", "phases", "z", "y_shunt"});
        Branch b;
        b.id = n.at("id").string();
        b.from = n.at("from").string();
        b.to = n.at("to").string();
        b.phases = phases_or_abc(n);
        const double s = z_scale(n, "from");
        b.z_abc = parse_matrix(n.at("z"), b.phases) * s;
        if (n.has("y_shunt")) b.y_shunt_abc = parse_matrix(n.at("y_shunt"), b.phases) / s;
        net_.branches.push_back(b);
    }

    void read_transformer(const Node& n) {
        n.only({"id", "from", "to", "from_conn", "to_conn", "tap", "z_leak", "z0_path", "phase_shift_deg",
                "phase_shift_rad"});
        Transformer t;
        t.id = n.at("id").string();
        t.from = n.at("from").string();
        t.to = n.at("to").string();
        if (n.has("from_conn")) t.from_conn = parse_winding(n.at("from_conn"));
        if (n.has("to_conn")) t.to_conn = parse_winding(n.at("to_conn"));
        t.tap = n.number_or("tap", 1.0);
        const double s = z_scale(n, "from");
        if (n.has("z_leak")) t.z_leak = n.at("z_leak").complex() * s;
        if (n.has("z0_path")) t.z0_path = n.at("z0_path").complex() * s;
        if (n.has("phase_shift_deg") && n.has("phase_shift_rad"))
            n.at("phase_shift_rad").fail("give either phase_shift_deg or phase_shift_rad");
        if (n.has("phase_shift_deg")) t.phase_shift = deg_to_rad(n.at("phase_shift_deg").number());
        if (n.has("phase_shift_rad")) t.phase_shift = n.at("phase_shift_rad").number();
        net_.transformers.push_back(t);
    }

    void read_regulator(const Node& n) {
        n.only({"id", "from", "to", "v_target", "step", "tap_min", "tap_max", "tap_init"});
        Regulator r;
        r.id = n.at("id").string();
        r.from = n.at("from").string();
        r.to = n.at("to").string();
        r.v_target = n.number_or("v_target", r.v_target);
        r.step = n.number_or("step", r.step);
        r.tap_min = n.number_or("tap_min", r.tap_min);
        r.tap_max = n.number_or("tap_max", r.tap_max);
        if (const auto ti = n.find("tap_init")) {
            if (ti->size() != 3) ti->fail("expected 3 entries");
            for (std::size_t i = 0; i < 3; ++i) r.tap_init[i] = (*ti)[i].number();
        }
        net_.regulators.push_back(r);
    }

    void read_load(const Node& n) {
        n.only({"id", "bus", "phases", "s", "s_total", "model"});
        Load l;
        l.id = n.at("id").string();
        l.bus = n.at("bus").string();
        l.phases = phases_or_abc(n);
        if (n.has("s") == n.has("s_total")) n.fail("give exactly one of 's' (per phase) or 's_total'");
        if (n.has("s")) {
            l.s = parse_phase_triple(n.at("s"), l.phases);
        } else {
            const Phasor each = n.at("s_total").complex() / static_cast<double>(l.phases.count());
            for (int p : active(l.phases)) l.s[static_cast<std::size_t>(p)] = each;
        }
        const std::string m = n.string_or("model", "pq");
        if (m == "pq") l.model = LoadModel::ConstantPower;
        else if (m == "z") l.model = LoadModel::ConstantImpedance;
        else n.at("model").fail("must be \"pq\" or \"z\"");
        net_.loads.push_back(l);
    }

    void read_source(const Node& n) {
        n.only({"id", "bus", "e", "e_abc", "z_int"});
        SourceIdeal s;
        s.id = n.at("id").string();
        s.bus = n.at("bus").string();
        if (n.has("e") == n.has("e_abc")) n.fail("give exactly one of 'e' (balanced) or 'e_abc'");
        if (n.has("e")) s.e_abc = balanced_set(n.at("e").complex());
        else s.e_abc = parse_phase_triple(n.at("e_abc"), PhaseSet::abc());
        if (n.has("z_int")) s.z_int = parse_matrix(n.at("z_int"), PhaseSet::abc()) * z_scale(n, "bus");
        net_.sources.push_back(s);
    }

    void read_generator(const Node& n) {
        n.only({"id", "bus", "p_set", "e_set", "z_machine"});
        Generator g;
        g.id = n.at("id").string();
        g.bus = n.at("bus").string();
        g.p_set = n.number_or("p_set", g.p_set);
        g.e_set = n.number_or("e_set", g.e_set);
        if (n.has("z_machine")) g.z_machine = n.at("z_machine").complex() * z_scale(n, "bus");
        net_.generators.push_back(g);
    }

    void read_switch(const Node& n) {
        n.only({"id", "from", "to", "phases", "closed"});
        Switch s;
        s.id = n.at("id").string();
        s.from = n.at("from").string();
        s.to = n.at("to").string();
        s.phases = phases_or_abc(n);
        if (const auto c = n.find("closed")) {
            if (c->raw().is_boolean()) {
                s.closed.fill(c->boolean());
            } else {
                if (c->size() != 3) c->fail("expected true/false or 3 entries");
                for (std::size_t i = 0; i < 3; ++i) s.closed[i] = (*c)[i].boolean();
            }
        }
        net_.switches.push_back(s);
    }

    void read_ibr(const Node& n) {
        n.only({"id", "bus", "mode", "s_rated_mva", "i_max", "p_ref", "q_ref", "v_ref", "k_factor", "k_neg", "k_zero",
                "z_filter", "phi", "kappa", "k_v", "csm"});
        IbrUnit u;
        u.id = n.at("id").string();
        u.bus = n.at("bus").string();
        const std::string mode = n.string_or("mode", "GFL");
        if (mode == "GFL") u.mode = IbrMode::GFL;
        else if (mode == "GFM") u.mode = IbrMode::GFM;
        else n.at("mode").fail("must be \"GFL\" or \"GFM\"");
        u.s_rated = n.number_or("s_rated_mva", u.s_rated);
        u.i_max = n.number_or("i_max", u.i_max);
        u.p_ref = n.number_or("p_ref", u.p_ref);
        u.q_ref = n.number_or("q_ref", u.q_ref);
        u.v_ref = n.number_or("v_ref", u.v_ref);
        u.k_factor = n.number_or("k_factor", u.k_factor);
        u.k_neg = n.complex_opt("k_neg");
        u.k_zero = n.complex_opt("k_zero");
        u.z_filter = n.complex_opt("z_filter");
        u.phi = n.number_or("phi", u.phi);
        if (n.has("kappa")) u.kappa = n.at("kappa").number();
        u.k_v = n.number_or("k_v", u.k_v);
        const std::string csm = n.string_or("csm", "improved");
        if (csm == "improved") u.csm = CsmVariant::Improved;
        else if (csm == "conventional") u.csm = CsmVariant::Conventional;
        else n.at("csm").fail("must be \"improved\" or \"conventional\"");
        net_.ibrs.push_back(u);
    }

    const Node& root_;
    NetworkModel net_;
    bool ohm_ = false;
};

}  // namespace

NetworkModel parse_network_text(const std::string& text, const std::string& origin) {
    const auto doc = detail::parse_json(text, origin);
    const LineIndex lines(text);
    const Node root(doc, "", lines, origin);
    NetworkModel net = NetworkReader(root).read();
    const ValidationReport rep = validate(net);
    if (!rep.ok()) throw InputError(origin + ": invalid network:\n" + rep.summary());
    return net;
}

NetworkModel parse_network(const std::filesystem::path& path) { return parse_network_text(detail::read_file(path), path.string()); }

std::string serialize_network(const NetworkModel& net) {
    ojson doc;
    doc["schema_version"] = kSchemaVersion;
    doc["name"] = net.name;
    doc["s_base_mva"] = net.base.s_base;
    doc["impedance_unit"] = "pu";

    ojson& buses = doc["buses"] = ojson::array();
    for (const auto& b : net.buses) buses.push_back({{"id", b.id}, {"phases", phases_text(b.phases)}, {"base_kv", b.base_kv}});

    ojson& branches = doc["branches"] = ojson::array();
    for (const auto& b : net.branches) {
        ojson o{{"id", b.id}, {"from", b.from}, {"to", b.to}, {"phases", phases_text(b.phases)},
                {"z", matrix_json(b.z_abc, b.phases)}};
        if (!b.y_shunt_abc.isZero(0.0)) o["y_shunt"] = matrix_json(b.y_shunt_abc, b.phases);
        branches.push_back(o);
    }

    ojson& xfs = doc["transformers"] = ojson::array();
    for (const auto& t : net.transformers) {
        ojson o{{"id", t.id}, {"from", t.from}, {"to", t.to}, {"from_conn", winding_text(t.from_conn)},
                {"to_conn", winding_text(t.to_conn)}, {"tap", t.tap}, {"z_leak", complex_json(t.z_leak)}};
        if (t.z0_path) o["z0_path"] = complex_json(*t.z0_path);
        if (t.phase_shift) o["phase_shift_rad"] = *t.phase_shift;
        xfs.push_back(o);
    }

    ojson& regs = doc["regulators"] = ojson::array();
    for (const auto& r : net.regulators)
        regs.push_back({{"id", r.id}, {"from", r.from}, {"to", r.to}, {"v_target", r.v_target}, {"step", r.step},
                        {"tap_min", r.tap_min}, {"tap_max", r.tap_max},
                        {"tap_init", {r.tap_init[0], r.tap_init[1], r.tap_init[2]}}});

    ojson& loads = doc["loads"] = ojson::array();
    for (const auto& l : net.loads) {
        ojson s = ojson::array();
        for (const auto& v : l.s) s.push_back(complex_json(v));
        loads.push_back({{"id", l.id}, {"bus", l.bus}, {"phases", phases_text(l.phases)}, {"s", s},
                         {"model", l.model == LoadModel::ConstantPower ? "pq" : "z"}});
    }

    ojson& srcs = doc["sources"] = ojson::array();
    for (const auto& s : net.sources) {
        ojson e = ojson::array();
        for (const auto& v : s.e_abc) e.push_back(complex_json(v));
        srcs.push_back({{"id", s.id}, {"bus", s.bus}, {"e_abc", e}, {"z_int", matrix_json(s.z_int, PhaseSet::abc())}});
    }

    ojson& gens = doc["generators"] = ojson::array();
    for (const auto& g : net.generators)
        gens.push_back({{"id", g.id}, {"bus", g.bus}, {"p_set", g.p_set}, {"e_set", g.e_set},
                        {"z_machine", complex_json(g.z_machine)}});

    ojson& sws = doc["switches"] = ojson::array();
    for (const auto& s : net.switches)
        sws.push_back({{"id", s.id}, {"from", s.from}, {"to", s.to}, {"phases", phases_text(s.phases)},
                       {"closed", {s.closed[0], s.closed[1], s.closed[2]}}});

    ojson& ibrs = doc["ibrs"] = ojson::array();
    for (const auto& u : net.ibrs) {
        ojson o{{"id", u.id},         {"bus", u.bus},         {"mode", u.mode == IbrMode::GFL ? "GFL" : "GFM"},
                {"s_rated_mva", u.s_rated}, {"i_max", u.i_max}, {"p_ref", u.p_ref},
                {"q_ref", u.q_ref},   {"v_ref", u.v_ref},     {"k_factor", u.k_factor}};
        if (u.k_neg) o["k_neg"] = complex_json(*u.k_neg);
        if (u.k_zero) o["k_zero"] = complex_json(*u.k_zero);
        if (u.z_filter) o["z_filter"] = complex_json(*u.z_filter);
        o["phi"] = u.phi;
        if (u.kappa) o["kappa"] = *u.kappa;
        o["k_v"] = u.k_v;
        o["csm"] = u.csm == CsmVariant::Improved ? "improved" : "conventional";
        ibrs.push_back(o);
    }
    return doc.dump(2) + "\n";
}

}  // namespace ibrsc
