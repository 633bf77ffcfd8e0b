#pragma once

// Polarization (control) x OAM-sign (target) hybrid qubit space of a single
// photon. Basis order is |0p0o>, |0p1o>, |1p0o>, |1p1o>: polarization H=0 / V=1,
// OAM sign +|l| = 0 / -|l| = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace oamcnot {

using cplx = std::complex<double>;
using Amplitudes4 = std::array<cplx, 4>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kZeroProbability = 1e-14;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

enum class Polarization { H = 0, V = 1 };
enum class OamSign { Positive = 0, Negative = 1 };
enum class PolarizationAxis { Horizontal, Vertical, Diagonal, Antidiagonal };

constexpr std::size_t basis_index(unsigned pol, unsigned oam) { return 2 * pol + oam; }

inline const char* to_string(Polarization p) { return p == Polarization::H ? "H" : "V"; }
inline const char* to_string(OamSign s) { return s == OamSign::Positive ? "+" : "-"; }

class HybridState {
public:
    /// Throws std::invalid_argument if magnitude < 1 or the amplitudes are not
    /// normalized to within kNormTolerance.
    HybridState(const Amplitudes4& amplitudes, int oam_magnitude)
        : amps_(amplitudes), magnitude_(oam_magnitude) {
        if (oam_magnitude < 1) {
            throw std::invalid_argument(
                "OAM magnitude must be >= 1: charge 0 has no sign to encode the target qubit");
        }
        double n = norm();
        if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
            throw std::invalid_argument("hybrid state amplitudes are not normalized (norm^2 = " +
                                        std::to_string(n) + ")");
        }
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    static HybridState normalized(Amplitudes4 amplitudes, int oam_magnitude) {
        double n = 0.0;
        for (const auto& a : amplitudes) n += std::norm(a);
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw std::invalid_argument("cannot normalize a zero or non-finite amplitude vector");
        }
        const double s = 1.0 / std::sqrt(n);
        for (auto& a : amplitudes) a *= s;
        return HybridState(amplitudes, oam_magnitude);
    }

    const Amplitudes4& amplitudes() const { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    const cplx& amplitude(unsigned pol, unsigned oam) const { return amps_[basis_index(pol, oam)]; }
    int oam_magnitude() const { return magnitude_; }

    double norm() const {
        double n = 0.0;
        for (const auto& a : amps_) n += std::norm(a);
        return n;
    }

    friend bool operator==(const HybridState&, const HybridState&) = default;

private:
    Amplitudes4 amps_;
    int magnitude_;
};

inline HybridState basis_state(unsigned pol, unsigned oam, int magnitude) {
    if (pol > 1 || oam > 1) throw std::invalid_argument("basis labels are bits (0 or 1)");
    if (magnitude < 1) {
        throw std::invalid_argument(
            "OAM magnitude must be >= 1: charge 0 has no sign to encode the target qubit");
    }
    Amplitudes4 a{};
    a[basis_index(pol, oam)] = 1.0;
    return HybridState(a, magnitude);
}

/// Flips the OAM sign when the polarization is V: (a,b,c,d) -> (a,b,d,c).
inline HybridState cnot(const HybridState& s) {
    const auto& a = s.amplitudes();
    return HybridState({a[0], a[1], a[3], a[2]}, s.oam_magnitude());
}

/// Polarization Hadamard (45 degree polarization rotation), identity on OAM.
inline HybridState hadamard_pol(const HybridState& s) {
    const auto& a = s.amplitudes();
    return HybridState({(a[0] + a[2]) * kInvSqrt2, (a[1] + a[3]) * kInvSqrt2,
                        (a[0] - a[2]) * kInvSqrt2, (a[1] - a[3]) * kInvSqrt2},
                       s.oam_magnitude());
}

inline HybridState bell_state(unsigned pol, unsigned oam, int magnitude) {
    return cnot(hadamard_pol(basis_state(pol, oam, magnitude)));
}

/// Jones vector of a polarization axis in the (H, V) basis.
inline std::array<double, 2> axis_vector(PolarizationAxis axis) {
    switch (axis) {
        case PolarizationAxis::Horizontal: return {1.0, 0.0};
        case PolarizationAxis::Vertical: return {0.0, 1.0};
        case PolarizationAxis::Diagonal: return {kInvSqrt2, kInvSqrt2};
        case PolarizationAxis::Antidiagonal: return {kInvSqrt2, -kInvSqrt2};
    }
    return {1.0, 0.0};
}

struct Projection {
    double probability = 0.0;
    /// Empty when probability < kZeroProbability (collapse undefined).
    std::optional<HybridState> collapsed;
};

/// Ideal linear polarizer along `axis`; the OAM part passes untouched.
inline Projection project_polarization(const HybridState& s, PolarizationAxis axis) {
    const auto e = axis_vector(axis);
    const auto& a = s.amplitudes();
    // <axis| acting on the polarization factor, one coefficient per OAM sign.
    const cplx along_plus = e[0] * a[0] + e[1] * a[2];
    const cplx along_minus = e[0] * a[1] + e[1] * a[3];
    Projection out;
    out.probability = std::norm(along_plus) + std::norm(along_minus);
    if (out.probability < kZeroProbability) {
        out.probability = std::max(out.probability, 0.0);
        return out;
    }
    const double r = 1.0 / std::sqrt(out.probability);
    out.collapsed = HybridState::normalized(
        {e[0] * along_plus * r, e[0] * along_minus * r, e[1] * along_plus * r,
         e[1] * along_minus * r},
        s.oam_magnitude());
    out.probability = std::min(out.probability, 1.0);
    return out;
}

/// Pure-state concurrence 2|ad - bc|.
inline double concurrence(const HybridState& s) {
    const auto& a = s.amplitudes();
    return std::min(1.0, 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]));
}

inline cplx inner_product(const HybridState& s1, const HybridState& s2) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) acc += std::conj(s1[i]) * s2[i];
    return acc;
}

inline double fidelity(const HybridState& s1, const HybridState& s2) {
    if (s1.oam_magnitude() != s2.oam_magnitude()) {
        throw std::invalid_argument("fidelity between states with different OAM magnitudes (" +
                                    std::to_string(s1.oam_magnitude()) + " vs " +
                                    std::to_string(s2.oam_magnitude()) +
                                    ") compares different physical encodings");
    }
    return std::min(1.0, std::norm(inner_product(s1, s2)));
}

}  // namespace oamcnot
