#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace ibrsc {

/// Complex per-unit phasor, stored rectangular.
using Phasor = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

inline constexpr double kPi = std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

inline double magnitude(Phasor p) { return std::abs(p); }
inline double angle(Phasor p) { return std::arg(p); }
inline Phasor from_polar(double mag, double angle_rad) { return std::polar(mag, angle_rad); }

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

/// Subset of {A, B, C}.
class PhaseSet {
  public:
    constexpr PhaseSet() = default;
    constexpr explicit PhaseSet(std::uint8_t bits) : bits_(bits & 0x7u) {}
    static constexpr PhaseSet abc() { return PhaseSet(0x7u); }

    constexpr bool has(int p) const { return (bits_ >> p) & 1u; }
    constexpr bool has(Phase p) const { return has(static_cast<int>(p)); }
    constexpr void set(int p) { bits_ |= static_cast<std::uint8_t>(1u << p); }
    constexpr int count() const { return has(0) + has(1) + has(2); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool is_three_phase() const { return bits_ == 0x7u; }
    constexpr bool contains(PhaseSet o) const { return (bits_ & o.bits_) == o.bits_; }
    constexpr PhaseSet operator&(PhaseSet o) const { return PhaseSet(bits_ & o.bits_); }
    constexpr std::uint8_t bits() const { return bits_; }
    friend constexpr bool operator==(PhaseSet, PhaseSet) = default;

  private:
    std::uint8_t bits_ = 0;
};

inline char phase_letter(int p) { return static_cast<char>('A' + p); }

}  // namespace ibrsc
