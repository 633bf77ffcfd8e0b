#pragma once

// Triangular-aperture OAM readout: find the bright lobes of the far-field
// lattice, infer |l| from the spots per side (T(N) = N(N+1)/2 lobes, |l| = N-1),
// and infer the sign from which way the lattice points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oamcnot/array2d.hpp"
#include "oamcnot/wavefield.hpp"

namespace oamcnot {

struct Peak {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
    std::size_t row = 0;
    std::size_t col = 0;

    friend bool operator==(const Peak&, const Peak&) = default;
};

struct PeakSet {
    std::vector<Peak> peaks;
    double threshold_frac = 0.3;
    double min_separation = 0.0;

    std::size_t size() const { return peaks.size(); }
    friend bool operator==(const PeakSet&, const PeakSet&) = default;
};

enum class SignReading { Positive, Negative, Undefined };

inline const char* to_string(SignReading s) {
    switch (s) {
        case SignReading::Positive: return "+";
        case SignReading::Negative: return "-";
        case SignReading::Undefined: return "undefined";
    }
    return "?";
}

struct ReadoutResult {
    int magnitude = 0;
    SignReading sign = SignReading::Undefined;
    int spots_per_side = 1;
    /// (aligned - reflected) / (aligned + reflected) template correlation; 0 when |l| = 0.
    double orientation_score = 0.0;
    PeakSet peaks;

    /// Signed charge, 0 when the sign is undefined.
    int signed_charge() const {
        if (sign == SignReading::Undefined) return 0;
        return sign == SignReading::Positive ? magnitude : -magnitude;
    }

    friend bool operator==(const ReadoutResult&, const ReadoutResult&) = default;
};

class ClassificationError : public std::runtime_error {
public:
    enum class Kind { NonTriangularCount, AmbiguousOrientation };

    ClassificationError(Kind kind, std::size_t peak_count, const std::string& what)
        : std::runtime_error(what), kind_(kind), peak_count_(peak_count) {}

    Kind kind() const { return kind_; }
    std::size_t peak_count() const { return peak_count_; }

private:
    Kind kind_;
    std::size_t peak_count_;
};

struct ReadoutOptions {
    double threshold_frac = 0.3;
    double min_separation = 0.0;  // meters in the focal plane
};

inline constexpr double kAmbiguityMargin = 0.05;

/// Direction a positive-charge lattice points, relative to the aperture vertex.
/// Mirroring the aperture maps l to -l and point reflection does the same, so a
/// single-sign lattice is symmetric about the axis perpendicular to the aperture's
/// and its vertex sits a quarter turn from the aperture vertex. The +pi/2 choice
/// makes l = +1 at orientation 0 read as "aligned".
inline constexpr double kPositiveLatticeOffset = std::numbers::pi / 2.0;

/// Default options: threshold 0.3 and a separation of 0.3 lattice constants
/// (lambda f / side), never below the 2-pixel floor find_peaks accepts.
inline ReadoutOptions default_readout_options(const OpticalParams& params, const ApertureSpec& ap,
                                              const Grid& focal_grid, double threshold_frac = 0.3) {
    const double lattice = params.wavelength * params.focal_length / ap.size;
    return {threshold_frac, std::max(0.3 * lattice, 2.0 * focal_grid.pitch())};
}

/// Strict 8-neighbour local maxima above threshold_frac * max, pruned greedily in
/// descending value so accepted peaks are at least min_separation apart. Border
/// pixels are never peaks. Ordering: value descending, then row-major.
inline PeakSet find_peaks(const Array2D<double>& img, double threshold_frac, double min_separation,
                          const Grid& grid) {
    if (!(threshold_frac > 0.0 && threshold_frac < 1.0)) {
        throw std::invalid_argument("threshold_frac must lie in (0, 1)");
    }
    if (!(min_separation >= 2.0 * grid.pitch() * (1.0 - 1e-12))) {
        throw std::invalid_argument("min_separation must be at least two output pixels (" +
                                    std::to_string(2.0 * grid.pitch()) + " m)");
    }
    if (img.size() != grid.n()) throw std::invalid_argument("image does not match grid");

    PeakSet set;
    set.threshold_frac = threshold_frac;
    set.min_separation = min_separation;

    double vmax = 0.0;
    for (double v : img.values()) {
        if (std::isnan(v)) throw std::invalid_argument("image contains NaN");
        vmax = std::max(vmax, v);
    }
    if (!(vmax > 0.0)) return set;
    const double floor_value = threshold_frac * vmax;

    const std::size_t n = img.size();
    std::vector<Peak> candidates;
    for (std::size_t r = 1; r + 1 < n; ++r) {
        for (std::size_t c = 1; c + 1 < n; ++c) {
            const double v = img(r, c);
            if (v < floor_value) continue;
            bool is_max = true;
            for (int dr = -1; dr <= 1 && is_max; ++dr)
                for (int dc = -1; dc <= 1 && is_max; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    is_max = v > img(r + dr, c + dc);
                }
            if (is_max) candidates.push_back({grid.coord(c), grid.coord(r), v, r, c});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Peak& a, const Peak& b) { return a.value > b.value; });

    const double sep2 = min_separation * min_separation;
    for (const Peak& p : candidates) {
        const bool clear = std::none_of(set.peaks.begin(), set.peaks.end(), [&](const Peak& q) {
            const double dx = p.x - q.x, dy = p.y - q.y;
            return dx * dx + dy * dy < sep2;
        });
        if (clear) set.peaks.push_back(p);
    }
    return set;
}

inline int count_spots_per_side(const PeakSet& peaks) {
    const std::size_t count = peaks.size();
    for (std::size_t n = 1; n * (n + 1) / 2 <= count; ++n) {
        if (n * (n + 1) / 2 == count) return static_cast<int>(n);
    }
    throw ClassificationError(ClassificationError::Kind::NonTriangularCount, count,
                              "peak count " + std::to_string(count) +
                                  " is not a triangular number; check grid resolution and threshold");
}

namespace detail {

struct Point {
    double x, y;
};

/// Triangular lattice with `side` points per edge whose first vertex points along
/// `direction`, circumradius `radius`, centroid at the origin.
inline std::vector<Point> lattice_template(int side, double direction, double radius) {
    constexpr double third = 2.0 * std::numbers::pi / 3.0;
    Point v[3];
    for (int k = 0; k < 3; ++k) {
        v[k] = {radius * std::cos(direction + k * third), radius * std::sin(direction + k * third)};
    }
    std::vector<Point> pts;
    const double steps = side - 1;
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side - i; ++j) {
            const int k = side - 1 - i - j;
            pts.push_back({(i * v[0].x + j * v[1].x + k * v[2].x) / steps,
                           (i * v[0].y + j * v[1].y + k * v[2].y) / steps});
        }
    return pts;
}

inline double rms_radius(const std::vector<Point>& pts) {
    double acc = 0.0;
    for (const auto& p : pts) acc += p.x * p.x + p.y * p.y;
    return std::sqrt(acc / static_cast<double>(pts.size()));
}

/// Mean over peaks of the best Gaussian-kernel match to a template point.
inline double template_correlation(const std::vector<Point>& peaks, const std::vector<Point>& tmpl,
                                   double sigma) {
    double acc = 0.0;
    for (const auto& p : peaks) {
        double best = 0.0;
        for (const auto& t : tmpl) {
            const double d2 = (p.x - t.x) * (p.x - t.x) + (p.y - t.y) * (p.y - t.y);
            best = std::max(best, std::exp(-d2 / (2.0 * sigma * sigma)));
        }
        acc += best;
    }
    return acc / static_cast<double>(peaks.size());
}

}  // namespace detail

/// Sign vote from a detected lattice of `side` spots per edge. Returns the
/// normalized margin (aligned - reflected) / (aligned + reflected).
inline double orientation_margin(const PeakSet& peaks, int side, const ApertureSpec& ap) {
    std::vector<detail::Point> pts;
    double cx = 0.0, cy = 0.0;
    for (const auto& p : peaks.peaks) {
        pts.push_back({p.x, p.y});
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    for (auto& p : pts) {
        p.x -= cx;
        p.y -= cy;
    }

    const double unit_rms = detail::rms_radius(detail::lattice_template(side, 0.0, 1.0));
    const double radius = detail::rms_radius(pts) / unit_rms;
    const double spacing = radius * std::sqrt(3.0) / (side - 1);
    const double sigma = 0.25 * spacing;

    const double aligned_dir = std::numbers::pi / 2.0 + ap.orientation + kPositiveLatticeOffset;
    const double aligned =
        detail::template_correlation(pts, detail::lattice_template(side, aligned_dir, radius), sigma);
    const double reflected = detail::template_correlation(
        pts, detail::lattice_template(side, aligned_dir + std::numbers::pi, radius), sigma);
    const double total = aligned + reflected;
    return total > 0.0 ? (aligned - reflected) / total : 0.0;
}

inline ReadoutResult classify_peaks(PeakSet peaks, const ApertureSpec& ap) {
    ReadoutResult res;
    res.spots_per_side = count_spots_per_side(peaks);
    res.magnitude = res.spots_per_side - 1;
    if (res.magnitude > 0) {
        res.orientation_score = orientation_margin(peaks, res.spots_per_side, ap);
        if (std::abs(res.orientation_score) < kAmbiguityMargin) {
            throw ClassificationError(ClassificationError::Kind::AmbiguousOrientation, peaks.size(),
                                      "lattice orientation is ambiguous (margin " +
                                          std::to_string(res.orientation_score) + ")");
        }
        res.sign = res.orientation_score > 0.0 ? SignReading::Positive : SignReading::Negative;
    }
    res.peaks = std::move(peaks);
    return res;
}

inline ReadoutResult classify_oam(const Array2D<double>& img, const ApertureSpec& ap, const Grid& grid,
                                  const ReadoutOptions& opts) {
    return classify_peaks(find_peaks(img, opts.threshold_frac, opts.min_separation, grid), ap);
}

/// lg_mode -> aperture -> far field -> intensity -> classify, at default readout options.
inline ReadoutResult readout_roundtrip(int ell, const OpticalParams& params, const Grid& grid,
                                       const ApertureSpec& ap, double threshold_frac = 0.3) {
    params.validate();
    const ScalarField source = lg_mode(grid, ell, params.beam_waist, params.wavelength);
    const ScalarField focal = far_field(apply_mask(source, triangle_mask(grid, ap)), params.focal_length);
    return classify_oam(intensity(focal), ap, focal.grid,
                        default_readout_options(params, ap, focal.grid, threshold_frac));
}

}  // namespace oamcnot
