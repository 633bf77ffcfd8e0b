#pragma once

// Scalar wave optics on a square sampled plane: Laguerre-Gauss vortex synthesis,
// aperture masks, and single-lens Fraunhofer propagation to the focal plane.
//
// Sample (row, col) sits at x = (col - n/2) * pitch, y = (row - n/2) * pitch.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

#include "oamcnot/array2d.hpp"
#include "oamcnot/fft.hpp"

namespace oamcnot {

using cplx = std::complex<double>;

inline constexpr int kMaxOamMagnitude = 10;

class Grid {
public:
    Grid(std::size_t n, double window) : n_(n), window_(window) {
        if (n < 64 || (n & (n - 1)) != 0) {
            throw std::invalid_argument("grid size must be a power of two >= 64, got " +
                                        std::to_string(n));
        }
        if (!(window > 0.0) || !std::isfinite(window)) {
            throw std::invalid_argument("grid window must be positive and finite");
        }
    }

    std::size_t n() const { return n_; }
    double window() const { return window_; }
    double pitch() const { return window_ / static_cast<double>(n_); }

    /// Physical coordinate of sample index i along either axis.
    double coord(std::size_t i) const {
        return (static_cast<double>(i) - static_cast<double>(n_ / 2)) * pitch();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t n_;
    double window_;
};

struct ScalarField {
    Array2D<cplx> samples;
    Grid grid;
    double wavelength;

    ScalarField(Array2D<cplx> s, Grid g, double lambda)
        : samples(std::move(s)), grid(g), wavelength(lambda) {
        if (samples.size() != grid.n()) throw std::invalid_argument("field samples do not match grid");
        if (!(lambda > 0.0)) throw std::invalid_argument("wavelength must be positive");
    }
};

enum class ApertureShape { EquilateralTriangle, Circle };

struct ApertureSpec {
    ApertureShape shape = ApertureShape::EquilateralTriangle;
    double size = 2e-3;         // triangle side length or circle diameter [m]
    double orientation = 0.0;   // triangle rotation [rad]; 0 = one vertex along +y
};

struct OpticalParams {
    double wavelength = 532e-9;
    double focal_length = 0.30;
    double beam_waist = 0.5e-3;

    void validate() const {
        if (!(wavelength > 0.0) || !(focal_length > 0.0) || !(beam_waist > 0.0)) {
            throw std::invalid_argument("optical parameters must be strictly positive");
        }
    }
};

inline double power(const ScalarField& f) {
    double acc = 0.0;
    for (const auto& v : f.samples.values()) acc += std::norm(v);
    return acc * f.grid.pitch() * f.grid.pitch();
}

inline Array2D<double> intensity(const ScalarField& f) {
    Array2D<double> out(f.grid.n());
    auto src = f.samples.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::norm(src[i]);
    return out;
}

/// LG_0^l vortex (r sqrt2 / w0)^|l| exp(-r^2/w0^2) exp(i l phi), unit power.
inline ScalarField lg_mode(const Grid& grid, int ell, double waist, double wavelength) {
    if (std::abs(ell) > kMaxOamMagnitude) {
        throw std::invalid_argument("OAM charge " + std::to_string(ell) + " outside supported range +-" +
                                    std::to_string(kMaxOamMagnitude));
    }
    const double lo = 4.0 * grid.pitch();
    const double hi = grid.window() / 4.0;
    if (!(waist >= lo && waist <= hi)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "beam waist %.6g m outside resolvable range [%.6g, %.6g] m", waist, lo, hi);
        throw std::invalid_argument(msg);
    }
    if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");

    const std::size_t n = grid.n();
    const int m = std::abs(ell);
    Array2D<cplx> s(n);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double y = grid.coord(r);
        for (std::size_t c = 0; c < n; ++c) {
            const double x = grid.coord(c);
            const double rho2 = x * x + y * y;
            double amp = std::exp(-rho2 / (waist * waist));
            if (m > 0) amp *= std::pow(std::sqrt(2.0 * rho2) / waist, m);
            const cplx v = ell == 0 ? cplx(amp, 0.0) : std::polar(amp, ell * std::atan2(y, x));
            s(r, c) = v;
            total += amp * amp;
        }
    }
    const double scale = 1.0 / (std::sqrt(total) * grid.pitch());
    for (auto& v : s.values()) v *= scale;
    return ScalarField(std::move(s), grid, wavelength);
}

namespace detail {

inline void check_aperture_fits(const Grid& grid, const ApertureSpec& ap) {
    if (!(ap.size > 0.0) || !std::isfinite(ap.size)) {
        throw std::invalid_argument("aperture size must be positive");
    }
    // Circumradius for the triangle, radius for the circle.
    const double reach = ap.shape == ApertureShape::EquilateralTriangle ? ap.size / std::sqrt(3.0)
                                                                        : ap.size / 2.0;
    if (ap.size >= grid.window() || reach >= grid.window() / 2.0) {
        throw std::invalid_argument("aperture of size " + std::to_string(ap.size) +
                                    " m does not fit inside the " + std::to_string(grid.window()) +
                                    " m window");
    }
}

}  // namespace detail

/// 1 where the pixel center lies inside the aperture, 0 elsewhere. The triangle's
/// centroid is on the optical axis.
inline Array2D<double> triangle_mask(const Grid& grid, const ApertureSpec& ap) {
    detail::check_aperture_fits(grid, ap);
    const std::size_t n = grid.n();
    Array2D<double> mask(n, 0.0);

    if (ap.shape == ApertureShape::Circle) {
        const double r2 = 0.25 * ap.size * ap.size;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                const double x = grid.coord(c), y = grid.coord(r);
                if (x * x + y * y <= r2) mask(r, c) = 1.0;
            }
        return mask;
    }

    // A triangle is invariant under 2pi/3 turns; reduce so equivalent
    // orientations rasterize bit-identically.
    constexpr double third = 2.0 * std::numbers::pi / 3.0;
    const double orient = ap.orientation - third * std::floor(ap.orientation / third);
    const double rc = ap.size / std::sqrt(3.0);
    double vx[3], vy[3];
    for (int k = 0; k < 3; ++k) {
        const double t = std::numbers::pi / 2.0 + orient + k * third;
        vx[k] = rc * std::cos(t);
        vy[k] = rc * std::sin(t);
    }
    for (std::size_t r = 0; r < n; ++r) {
        const double y = grid.coord(r);
        for (std::size_t c = 0; c < n; ++c) {
            const double x = grid.coord(c);
            bool inside = true;
            for (int k = 0; k < 3 && inside; ++k) {
                const int j = (k + 1) % 3;
                const double cross = (vx[j] - vx[k]) * (y - vy[k]) - (vy[j] - vy[k]) * (x - vx[k]);
                inside = cross >= 0.0;
            }
            if (inside) mask(r, c) = 1.0;
        }
    }
    return mask;
}

inline ScalarField apply_mask(const ScalarField& field, const Array2D<double>& mask) {
    if (mask.size() != field.grid.n()) {
        throw std::invalid_argument("mask size " + std::to_string(mask.size()) +
                                    " does not match grid size " + std::to_string(field.grid.n()));
    }
    Array2D<cplx> out = field.samples;
    auto o = out.values();
    auto m = mask.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] *= m[i];
    return ScalarField(std::move(out), field.grid, field.wavelength);
}

/// Output-plane grid of a lens with focal length f: pitch lambda f / window.
inline Grid far_field_grid(const Grid& in, double wavelength, double focal_length) {
    return Grid(in.n(), wavelength * focal_length / in.pitch());
}

/// Focal-plane field of a thin lens placed right after the input plane: a
/// centered DFT with x' = lambda f u, scaled by pitch^2 / (lambda f) so that
/// total power is conserved.
inline ScalarField far_field(const ScalarField& field, double focal_length) {
    if (!(focal_length > 0.0)) throw std::invalid_argument("focal length must be positive");
    const Grid out_grid = far_field_grid(field.grid, field.wavelength, focal_length);
    Array2D<cplx> spectrum = fft::centered_forward(field.samples);
    const double scale = field.grid.pitch() * field.grid.pitch() / (field.wavelength * focal_length);
    for (auto& v : spectrum.values()) v *= scale;
    return ScalarField(std::move(spectrum), out_grid, field.wavelength);
}

}  // namespace oamcnot
