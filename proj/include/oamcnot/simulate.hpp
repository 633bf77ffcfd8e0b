#pragma once

// Interpreters for parsed circuits: the logical layer (4-amplitude hybrid
// state) and the wave layer (scalar fields through aperture and lens).

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "oamcnot/circuit.hpp"
#include "oamcnot/hybrid_state.hpp"
#include "oamcnot/interferometer.hpp"
#include "oamcnot/readout.hpp"
#include "oamcnot/wavefield.hpp"

namespace oamcnot {

struct LogicalStep {
    std::size_t statement = 0;
    std::optional<HybridState> state;   // empty once a polarizer blocked the photon
    std::optional<double> probability;  // set for POLARIZER statements
};

struct LogicalRun {
    std::vector<LogicalStep> steps;
    std::optional<HybridState> final_state;
    /// Index of the POLARIZER whose outcome had zero probability, if any.
    std::optional<std::size_t> blocked_at;
};

/// Jones matrix of a half-wave plate with its fast axis at `angle_deg`:
/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]]. Linear polarization turns by 2t and
/// 22.5 degrees is the polarization Hadamard.
inline HybridState apply_hwp(const HybridState& s, double angle_deg) {
    const double t = 2.0 * angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(t), sn = std::sin(t);
    const auto& a = s.amplitudes();
    return HybridState::normalized({c * a[0] + sn * a[2], c * a[1] + sn * a[3], sn * a[0] - c * a[2],
                                    sn * a[1] - c * a[3]},
                                   s.oam_magnitude());
}

inline HybridState source_state(const Source& src, int magnitude) {
    const unsigned oam = src.ell < 0 ? 1u : 0u;
    Amplitudes4 a{};
    switch (src.pol) {
        case SourcePolarization::H: a[basis_index(0, oam)] = 1.0; break;
        case SourcePolarization::V: a[basis_index(1, oam)] = 1.0; break;
        case SourcePolarization::D:
            a[basis_index(0, oam)] = kInvSqrt2;
            a[basis_index(1, oam)] = kInvSqrt2;
            break;
        case SourcePolarization::A:
            a[basis_index(0, oam)] = kInvSqrt2;
            a[basis_index(1, oam)] = -kInvSqrt2;
            break;
    }
    return HybridState::normalized(a, magnitude);
}

namespace detail {

/// `magnitude` stands in for |l| when the source carries l = 0 (no MZI_CNOT is
/// then allowed, so the placeholder sign is never touched).
inline LogicalRun run_logical_with(const Circuit& circuit, int magnitude) {
    if (circuit.statements.empty() || !std::holds_alternative<Source>(circuit.statements.front())) {
        throw std::invalid_argument("circuit must start with SOURCE");
    }
    LogicalRun run;
    std::optional<HybridState> state = source_state(circuit.source(), magnitude);
    run.steps.push_back({0, state, std::nullopt});

    for (std::size_t i = 1; i < circuit.statements.size(); ++i) {
        const Statement& st = circuit.statements[i];
        LogicalStep step{i, std::nullopt, std::nullopt};
        if (const auto* hwp = std::get_if<Hwp>(&st)) {
            state = apply_hwp(*state, hwp->angle_deg);
        } else if (const auto* mzi = std::get_if<MziCnot>(&st)) {
            state = apply_matrix(compose_mzi(ElementConfig::preset(mzi->mode), state->oam_magnitude()), *state);
        } else if (const auto* pol = std::get_if<Polarizer>(&st)) {
            const auto axis = pol->axis == Polarization::H ? PolarizationAxis::Horizontal : PolarizationAxis::Vertical;
            Projection p = project_polarization(*state, axis);
            step.probability = p.probability;
            if (!p.collapsed) {
                run.steps.push_back(step);
                run.blocked_at = i;
                return run;
            }
            state = std::move(p.collapsed);
        }
        step.state = state;
        run.steps.push_back(step);
    }
    run.final_state = state;
    return run;
}

}  // namespace detail

/// Source builds the prepared state, HWP applies the plate's Jones matrix,
/// MZI_CNOT applies the interferometer transfer matrix, POLARIZER projects.
/// TRIAPERTURE and DETECT do nothing at this layer.
inline LogicalRun run_logical(const Circuit& circuit) {
    if (circuit.statements.empty() || !std::holds_alternative<Source>(circuit.statements.front())) {
        throw std::invalid_argument("circuit must start with SOURCE");
    }
    const int ell = circuit.source().ell;
    if (ell == 0) {
        throw std::invalid_argument("the logical layer needs |l| >= 1; oam=0 has no sign qubit");
    }
    return detail::run_logical_with(circuit, std::abs(ell));
}

struct WaveOutcome {
    Polarization polarization = Polarization::H;
    double probability = 0.0;
    /// Normalized OAM amplitudes (+|l|, -|l|) of this polarization outcome.
    std::array<cplx, 2> oam_amplitudes{};
    Grid focal_grid{64, 1.0};
    Array2D<double> image;
    std::optional<ReadoutResult> readout;
    std::optional<ClassificationError> readout_error;

    /// OAM sign the logical layer predicts for this outcome, if it is definite.
    std::optional<OamSign> expected_sign() const {
        const double plus = std::norm(oam_amplitudes[0]);
        const double minus = std::norm(oam_amplitudes[1]);
        if (minus < kNormTolerance) return OamSign::Positive;
        if (plus < kNormTolerance) return OamSign::Negative;
        return std::nullopt;
    }
};

struct WaveRun {
    LogicalRun logical;
    bool has_aperture = false;
    std::vector<WaveOutcome> outcomes;
};

/// Renders the focal-plane intensity of each polarization outcome with nonzero
/// probability, and classifies it when the circuit has a TRIAPERTURE.
/// Classification failures are recorded per outcome rather than thrown.
inline WaveRun render_wave(const Circuit& circuit, const Grid& grid, const OpticalParams& params,
                           double threshold_frac = 0.3) {
    params.validate();
    if (circuit.statements.empty() || !std::holds_alternative<Source>(circuit.statements.front())) {
        throw std::invalid_argument("circuit must start with SOURCE");
    }
    const int ell = circuit.source().ell;
    const int magnitude = std::abs(ell);

    WaveRun run;
    run.logical = detail::run_logical_with(circuit, std::max(magnitude, 1));
    if (!run.logical.final_state) return run;
    const HybridState& fin = *run.logical.final_state;

    const TriangleAperture* tri = circuit.find<TriangleAperture>();
    run.has_aperture = tri != nullptr;
    std::optional<Array2D<double>> mask;
    if (tri) mask = triangle_mask(grid, tri->spec());

    std::optional<ScalarField> plus_mode, minus_mode;
    for (unsigned pol = 0; pol < 2; ++pol) {
        const cplx a_plus = fin.amplitude(pol, 0);
        const cplx a_minus = fin.amplitude(pol, 1);
        const double p = std::norm(a_plus) + std::norm(a_minus);
        if (p <= kZeroProbability) continue;

        WaveOutcome out;
        out.polarization = static_cast<Polarization>(pol);
        out.probability = p;
        const double r = 1.0 / std::sqrt(p);
        out.oam_amplitudes = {a_plus * r, a_minus * r};

        // l = 0 has a single (Gaussian) spatial mode.
        Array2D<cplx> samples(grid.n(), cplx{});
        auto add = [&](std::optional<ScalarField>& cache, int charge, cplx weight) {
            if (std::norm(weight) <= kZeroProbability) return;
            if (!cache) cache = lg_mode(grid, charge, params.beam_waist, params.wavelength);
            auto dst = samples.values();
            auto src = cache->samples.values();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += weight * src[i];
        };
        add(plus_mode, magnitude, out.oam_amplitudes[0]);
        add(minus_mode, -magnitude, out.oam_amplitudes[1]);

        ScalarField field(std::move(samples), grid, params.wavelength);
        if (mask) field = apply_mask(field, *mask);
        const ScalarField focal = far_field(field, params.focal_length);
        out.focal_grid = focal.grid;
        out.image = intensity(focal);

        if (tri) {
            const ApertureSpec spec = tri->spec();
            try {
                out.readout = classify_oam(out.image, spec, focal.grid,
                                           default_readout_options(params, spec, focal.grid, threshold_frac));
            } catch (const ClassificationError& e) {
                out.readout_error = e;
            }
        }
        run.outcomes.push_back(std::move(out));
    }
    return run;
}

/// Wave-layer run of a complete readout circuit. Requires TRIAPERTURE and
/// DETECT; classification failures propagate.
inline WaveRun run_wave(const Circuit& circuit, const Grid& grid, const OpticalParams& params,
                        double threshold_frac = 0.3) {
    if (!circuit.contains<TriangleAperture>()) {
        throw std::invalid_argument("run_wave needs a TRIAPERTURE statement to read out the OAM sign");
    }
    if (!circuit.contains<Detect>()) throw std::invalid_argument("run_wave needs a DETECT statement");
    WaveRun run = render_wave(circuit, grid, params, threshold_frac);
    for (const auto& o : run.outcomes)
        if (o.readout_error) throw *o.readout_error;
    return run;
}

}  // namespace oamcnot
