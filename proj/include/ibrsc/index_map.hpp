#pragma once

// Ordering of MANA unknowns. Complex unknowns are split into two consecutive
// real slots (re, im); taps are single real slots. Blocks follow the order
//   V_n, I_v, I_d, I_s, I_L, I_G, E, g, I_IBR.

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "ibrsc/netmodel.hpp"

namespace ibrsc {

enum class Formulation { SS, PF };

enum class Block {
    NodeVoltage,
    SourceCurrent,
    TransformerCurrent,
    SwitchCurrent,
    LoadCurrent,
    GeneratorCurrent,
    InternalEmf,
    RegulatorTap,
    IbrCurrent,
};

std::string to_string(Block b);

struct Unknown {
    Block block;
    std::string element;
    std::string label;
    bool is_complex = true;
    int slot = 0;  // first real slot
};

class IndexMap {
  public:
    int add_complex(Block b, const std::string& element, const std::string& label);
    int add_real(Block b, const std::string& element, const std::string& label);

    /// Number of real slots.
    int size() const { return slots_; }
    bool empty() const { return slots_ == 0; }
    const std::vector<Unknown>& unknowns() const { return unknowns_; }

    /// First real slot of an unknown, or -1.
    int find(Block b, const std::string& element, const std::string& label) const;
    int slot(Block b, const std::string& element, const std::string& label) const;

    /// Slot range [begin, end) of a block.
    std::pair<int, int> block_range(Block b) const;
    int block_slots(Block b) const;

    /// Human-readable slot name, e.g. "V[bus3.A].re".
    std::string slot_name(int slot) const;
    const Unknown& unknown_at_slot(int slot) const;
    bool all_complex() const;

    friend bool operator==(const IndexMap& a, const IndexMap& b);

  private:
    std::vector<Unknown> unknowns_;
    std::vector<int> slot_owner_;
    std::map<std::tuple<Block, std::string, std::string>, int> lookup_;
    int slots_ = 0;
};

/// Voltage slot of node n; node voltages always come first.
inline int voltage_slot(int node) { return 2 * node; }

/// Phase label "A", "B" or "C".
inline std::string phase_label(int p) { return std::string(1, phase_letter(p)); }

/// Unknown ordering for a network. SS uses the nominal linear equivalent
/// (constant-impedance loads, generators as EMF sources, IBRs as injections).
/// Throws InputError on duplicate ids.
IndexMap index_unknowns(const NetworkModel& net, Formulation formulation);

}  // namespace ibrsc
