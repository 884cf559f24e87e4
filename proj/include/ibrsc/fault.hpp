#pragma once

// Shunt fault specification and its admittance stamp. A fault is a star of
// z_fault per involved phase joined at a fault point, which is tied to ground
// through z_ground for grounded kinds. The star point is eliminated (Kron), so
// the stamp adds no unknowns.

#include <string>
#include <vector>

#include "ibrsc/phasor.hpp"

namespace ibrsc {

enum class FaultKind { AG, BG, CG, AB, BC, CA, ABG, BCG, CAG, ABC, ABCG };

/// z_fault below this magnitude is replaced by it (bolted fault).
inline constexpr double kBoltedImpedance = 1e-6;

struct FaultSpec {
    std::string bus;
    FaultKind kind = FaultKind::ABCG;
    Phasor z_fault{0.0, 0.0};   // per phase, pu
    Phasor z_ground{0.0, 0.0};  // star point to ground, pu (grounded kinds only)
};

std::string to_string(FaultKind k);
/// Accepts upper or lower case names such as "ag" or "ABCG"; throws InputError.
FaultKind parse_fault_kind(const std::string& s);
const std::vector<FaultKind>& all_fault_kinds();

PhaseSet fault_phases(FaultKind k);
bool fault_grounded(FaultKind k);
/// True for ABC and ABCG.
bool fault_balanced(FaultKind k);

/// 3x3 phase admittance of the fault (zero rows/cols for uninvolved phases).
Mat3 fault_admittance(const FaultSpec& f);

}  // namespace ibrsc
