#pragma once

// Path-resolved model of the modified Mach-Zehnder interferometer:
// PBS1 -> {mirror on the lower (H) arm, pentaprism on the upper (V) arm} -> PBS2.
// The lower path is both the PBS1 input port and the designated PBS2 output port.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "oamcnot/hybrid_state.hpp"

namespace oamcnot {

enum class Path { Lower = 0, Upper = 1 };

enum class MziMode { PaperDefault, StrictParity };

inline const char* to_string(MziMode m) {
    return m == MziMode::PaperDefault ? "paper-default" : "strict-parity";
}

struct ElementConfig {
    double pbs_reflection_phase = 0.0;  // radians, per PBS reflection event
    bool mirror_flips_oam = false;
    bool pentaprism_flips_oam = true;
    MziMode mode = MziMode::PaperDefault;

    static ElementConfig paper_default() { return {}; }

    /// One OAM-sign toggle per physical reflection: PBS reflections and the mirror
    /// toggle, the pentaprism's two internal reflections cancel.
    static ElementConfig strict_parity() { return {0.0, true, false, MziMode::StrictParity}; }

    static ElementConfig preset(MziMode m) {
        return m == MziMode::PaperDefault ? paper_default() : strict_parity();
    }
};

class PathState {
public:
    using Amplitudes = std::array<cplx, 8>;

    static constexpr std::size_t index(Path path, unsigned pol, unsigned oam) {
        return 4 * static_cast<std::size_t>(path) + 2 * pol + oam;
    }

    PathState(const Amplitudes& amplitudes, int oam_magnitude)
        : amps_(amplitudes), magnitude_(oam_magnitude) {
        if (oam_magnitude < 1) throw std::invalid_argument("OAM magnitude must be >= 1");
    }

    /// Logical state injected at the PBS1 input port.
    static PathState at_input(const HybridState& s) {
        Amplitudes a{};
        for (unsigned i = 0; i < 4; ++i) a[i] = s[i];
        return PathState(a, s.oam_magnitude());
    }

    const Amplitudes& amplitudes() const { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    const cplx& at(Path path, unsigned pol, unsigned oam) const { return amps_[index(path, pol, oam)]; }
    int oam_magnitude() const { return magnitude_; }

    double norm() const {
        double n = 0.0;
        for (const auto& a : amps_) n += std::norm(a);
        return n;
    }

    double path_norm(Path path) const {
        double n = 0.0;
        for (unsigned k = 0; k < 4; ++k) n += std::norm(amps_[4 * static_cast<unsigned>(path) + k]);
        return n;
    }

    PathState operator+(const PathState& o) const {
        Amplitudes a{};
        for (std::size_t i = 0; i < 8; ++i) a[i] = amps_[i] + o.amps_[i];
        return PathState(a, magnitude_);
    }
    PathState operator*(cplx k) const {
        Amplitudes a{};
        for (std::size_t i = 0; i < 8; ++i) a[i] = amps_[i] * k;
        return PathState(a, magnitude_);
    }

    friend bool operator==(const PathState&, const PathState&) = default;

private:
    Amplitudes amps_;
    int magnitude_;
};

/// H transmitted (keeps its path); V reflected (swaps path, picks up the
/// reflection phase, and toggles the OAM sign in strict-parity mode).
inline PathState pbs_apply(const PathState& s, const ElementConfig& cfg) {
    PathState::Amplitudes out{};
    const cplx reflect = std::polar(1.0, cfg.pbs_reflection_phase);
    const bool flip = cfg.mode == MziMode::StrictParity;
    for (unsigned p = 0; p < 2; ++p) {
        const auto path = static_cast<Path>(p);
        const auto other = static_cast<Path>(1 - p);
        for (unsigned oam = 0; oam < 2; ++oam) {
            out[PathState::index(path, 0, oam)] += s.at(path, 0, oam);
            out[PathState::index(other, 1, flip ? 1 - oam : oam)] += reflect * s.at(path, 1, oam);
        }
    }
    return PathState(out, s.oam_magnitude());
}

namespace detail {

inline PathState toggle_arm(const PathState& s, Path arm, bool flip) {
    if (!flip) return s;
    PathState::Amplitudes out = s.amplitudes();
    for (unsigned pol = 0; pol < 2; ++pol) {
        out[PathState::index(arm, pol, 0)] = s.at(arm, pol, 1);
        out[PathState::index(arm, pol, 1)] = s.at(arm, pol, 0);
    }
    return PathState(out, s.oam_magnitude());
}

}  // namespace detail

inline PathState mirror_apply(const PathState& s, const ElementConfig& cfg) {
    return detail::toggle_arm(s, Path::Lower, cfg.mirror_flips_oam);
}

inline PathState pentaprism_apply(const PathState& s, const ElementConfig& cfg) {
    return detail::toggle_arm(s, Path::Upper, cfg.pentaprism_flips_oam);
}

using Matrix4 = std::array<std::array<cplx, 4>, 4>;

inline Matrix4 identity_matrix() {
    Matrix4 m{};
    for (std::size_t i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

inline Matrix4 cnot_matrix() {
    Matrix4 m{};
    m[0][0] = 1.0;
    m[1][1] = 1.0;
    m[3][2] = 1.0;
    m[2][3] = 1.0;
    return m;
}

inline Matrix4 multiply(const Matrix4& a, const Matrix4& b) {
    Matrix4 m{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t k = 0; k < 4; ++k) m[i][j] += a[i][k] * b[k][j];
    return m;
}

inline Matrix4 adjoint(const Matrix4& a) {
    Matrix4 m{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) m[i][j] = std::conj(a[j][i]);
    return m;
}

inline double max_abs_difference(const Matrix4& a, const Matrix4& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
    return d;
}

/// max |U^dagger U - I|
inline double unitarity_defect(const Matrix4& u) {
    return max_abs_difference(multiply(adjoint(u), u), identity_matrix());
}

inline HybridState apply_matrix(const Matrix4& m, const HybridState& s) {
    Amplitudes4 out{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) out[i] += m[i][j] * s[j];
    return HybridState::normalized(out, s.oam_magnitude());
}

class RoutingError : public std::runtime_error {
public:
    RoutingError(std::size_t basis, double leaked)
        : std::runtime_error("routing failure: basis state " + std::to_string(basis) +
                             " leaves amplitude " + std::to_string(leaked) +
                             " on the non-output port"),
          basis_(basis) {}
    std::size_t basis() const { return basis_; }

private:
    std::size_t basis_;
};

/// Full interferometer pass for one state injected at the PBS1 input port.
inline PathState propagate_mzi(const PathState& in, const ElementConfig& cfg) {
    PathState s = pbs_apply(in, cfg);
    s = mirror_apply(s, cfg);
    s = pentaprism_apply(s, cfg);
    return pbs_apply(s, cfg);
}

/// Logical 4x4 transfer matrix read at the PBS2 output port. Column j is the
/// image of basis state j.
inline Matrix4 compose_mzi(const ElementConfig& cfg, int oam_magnitude = 1) {
    Matrix4 m{};
    for (unsigned j = 0; j < 4; ++j) {
        Amplitudes4 e{};
        e[j] = 1.0;
        const PathState out = propagate_mzi(PathState::at_input(HybridState(e, oam_magnitude)), cfg);
        const double leaked = out.path_norm(Path::Upper);
        if (leaked > kNormTolerance) throw RoutingError(j, leaked);
        for (unsigned i = 0; i < 4; ++i) m[i][j] = out[i];
    }
    return m;
}

/// Max elementwise |matrix - CNOT| after removing the global phase that best
/// aligns `m` with CNOT.
inline double verify_cnot(const Matrix4& m) {
    const Matrix4 c = cnot_matrix();
    cplx overlap = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) overlap += std::conj(c[i][j]) * m[i][j];
    cplx phase = 1.0;
    if (std::abs(overlap) > 0.0) phase = overlap / std::abs(overlap);
    Matrix4 aligned{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) aligned[i][j] = m[i][j] / phase;
    return max_abs_difference(aligned, c);
}

}  // namespace oamcnot
