#include "ibrsc/fault.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ibrsc/errors.hpp"

namespace ibrsc {

namespace {

struct KindInfo {
    FaultKind kind;
    const char* name;
    std::uint8_t phases;
    bool grounded;
};

constexpr KindInfo kKinds[] = {
    {FaultKind::AG, "AG", 0b001, true},    {FaultKind::BG, "BG", 0b010, true},
    {FaultKind::CG, "CG", 0b100, true},    {FaultKind::AB, "AB", 0b011, false},
    {FaultKind::BC, "BC", 0b110, false},   {FaultKind::CA, "CA", 0b101, false},
    {FaultKind::ABG, "ABG", 0b011, true},  {FaultKind::BCG, "BCG", 0b110, true},
    {FaultKind::CAG, "CAG", 0b101, true},  {FaultKind::ABC, "ABC", 0b111, false},
    {FaultKind::ABCG, "ABCG", 0b111, true},
};

const KindInfo& info(FaultKind k) {
    for (const auto& i : kKinds)
        if (i.kind == k) return i;
    throw InputError("unknown fault kind");
}

}  // namespace

std::string to_string(FaultKind k) { return info(k).name; }

FaultKind parse_fault_kind(const std::string& s) {
    std::string up = s;
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (up == "AC") up = "CA";
    if (up == "ACG") up = "CAG";
    for (const auto& i : kKinds)
        if (up == i.name) return i.kind;
    throw InputError("unknown fault kind '" + s + "'");
}

const std::vector<FaultKind>& all_fault_kinds() {
    static const std::vector<FaultKind> all = [] {
        std::vector<FaultKind> v;
        for (const auto& i : kKinds) v.push_back(i.kind);
        return v;
    }();
    return all;
}

PhaseSet fault_phases(FaultKind k) { return PhaseSet(info(k).phases); }
bool fault_grounded(FaultKind k) { return info(k).grounded; }
bool fault_balanced(FaultKind k) { return k == FaultKind::ABC || k == FaultKind::ABCG; }

Mat3 fault_admittance(const FaultSpec& f) {
    const PhaseSet ph = fault_phases(f.kind);
    if (!std::isfinite(std::abs(f.z_fault))) return Mat3::Zero();
    const Phasor zp = std::abs(f.z_fault) < kBoltedImpedance ? Phasor(kBoltedImpedance, 0.0) : f.z_fault;
    const Phasor yp = 1.0 / zp;
    const double n = ph.count();
    // Star point elimination: Y_ij = yp d_ij - yp^2 / (n yp + yg).
    Phasor coupling{0.0, 0.0};
    if (!fault_grounded(f.kind)) {
        coupling = yp / n;
    } else if (std::abs(f.z_ground) > 0.0) {
        const Phasor yg = 1.0 / f.z_ground;
        coupling = yp * yp / (n * yp + yg);
    }
    Mat3 y = Mat3::Zero();
    for (int i = 0; i < 3; ++i) {
        if (!ph.has(i)) continue;
        for (int j = 0; j < 3; ++j) {
            if (!ph.has(j)) continue;
            y(i, j) = (i == j ? yp : Phasor{}) - coupling;
        }
    }
    return y;
}

}  // namespace ibrsc
