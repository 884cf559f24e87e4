#include "ibrsc/index_map.hpp"

#include <set>

#include "ibrsc/errors.hpp"
#include "ibrsc/linearize.hpp"
#include "ibrsc/mana.hpp"

namespace ibrsc {

std::string to_string(Block b) {
    switch (b) {
        case Block::NodeVoltage: return "V";
        case Block::SourceCurrent: return "Iv";
        case Block::TransformerCurrent: return "Id";
        case Block::SwitchCurrent: return "Is";
        case Block::LoadCurrent: return "IL";
        case Block::GeneratorCurrent: return "IG";
        case Block::InternalEmf: return "E";
        case Block::RegulatorTap: return "g";
        case Block::IbrCurrent: return "IIBR";
    }
    return "?";
}

int IndexMap::add_complex(Block b, const std::string& element, const std::string& label) {
    auto key = std::make_tuple(b, element, label);
    if (lookup_.count(key)) throw InputError("duplicate unknown " + to_string(b) + "[" + element + "." + label + "]");
    const int s = slots_;
    lookup_.emplace(std::move(key), static_cast<int>(unknowns_.size()));
    unknowns_.push_back({b, element, label, true, s});
    slot_owner_.push_back(static_cast<int>(unknowns_.size()) - 1);
    slot_owner_.push_back(static_cast<int>(unknowns_.size()) - 1);
    slots_ += 2;
    return s;
}

int IndexMap::add_real(Block b, const std::string& element, const std::string& label) {
    auto key = std::make_tuple(b, element, label);
    if (lookup_.count(key)) throw InputError("duplicate unknown " + to_string(b) + "[" + element + "." + label + "]");
    const int s = slots_;
    lookup_.emplace(std::move(key), static_cast<int>(unknowns_.size()));
    unknowns_.push_back({b, element, label, false, s});
    slot_owner_.push_back(static_cast<int>(unknowns_.size()) - 1);
    slots_ += 1;
    return s;
}

int IndexMap::find(Block b, const std::string& element, const std::string& label) const {
    auto it = lookup_.find(std::make_tuple(b, element, label));
    return it == lookup_.end() ? -1 : unknowns_[static_cast<std::size_t>(it->second)].slot;
}

int IndexMap::slot(Block b, const std::string& element, const std::string& label) const {
    const int s = find(b, element, label);
    if (s < 0) throw InputError("no unknown " + to_string(b) + "[" + element + "." + label + "]");
    return s;
}

std::pair<int, int> IndexMap::block_range(Block b) const {
    int lo = -1, hi = -1;
    for (const auto& u : unknowns_) {
        if (u.block != b) continue;
        if (lo < 0) lo = u.slot;
        hi = u.slot + (u.is_complex ? 2 : 1);
    }
    if (lo < 0) return {0, 0};
    return {lo, hi};
}

int IndexMap::block_slots(Block b) const {
    auto [lo, hi] = block_range(b);
    return hi - lo;
}

const Unknown& IndexMap::unknown_at_slot(int slot) const {
    return unknowns_[static_cast<std::size_t>(slot_owner_.at(static_cast<std::size_t>(slot)))];
}

std::string IndexMap::slot_name(int slot) const {
    const auto& u = unknown_at_slot(slot);
    std::string s = to_string(u.block) + "[" + u.element + "." + u.label + "]";
    if (u.is_complex) s += (slot == u.slot ? ".re" : ".im");
    return s;
}

bool IndexMap::all_complex() const {
    for (const auto& u : unknowns_)
        if (!u.is_complex) return false;
    return true;
}

bool operator==(const IndexMap& a, const IndexMap& b) {
    if (a.slots_ != b.slots_ || a.unknowns_.size() != b.unknowns_.size()) return false;
    for (std::size_t i = 0; i < a.unknowns_.size(); ++i) {
        const auto& x = a.unknowns_[i];
        const auto& y = b.unknowns_[i];
        if (x.block != y.block || x.element != y.element || x.label != y.label || x.is_complex != y.is_complex || x.slot != y.slot)
            return false;
    }
    return true;
}

namespace {

template <typename Range>
void check_unique(const Range& items, const char* kind) {
    std::set<std::string> seen;
    for (const auto& it : items)
        if (!seen.insert(it.id).second) throw InputError(std::string("duplicate ") + kind + " id '" + it.id + "'");
}

}  // namespace

IndexMap index_unknowns(const NetworkModel& net, Formulation formulation) {
    check_unique(net.buses, "bus");
    check_unique(net.branches, "branch");
    check_unique(net.transformers, "transformer");
    check_unique(net.regulators, "regulator");
    check_unique(net.loads, "load");
    check_unique(net.sources, "source");
    check_unique(net.generators, "generator");
    check_unique(net.switches, "switch");
    check_unique(net.ibrs, "ibr");
    if (formulation == Formulation::SS) return index_linear(nominal_linear_network(net));
    return index_pf(net);
}

}  // namespace ibrsc
