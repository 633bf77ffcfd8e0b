#include "oamcnot/readout.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "gtest/gtest.h"

using namespace oamcnot;

namespace {

constexpr double kPi = std::numbers::pi;
const OpticalParams kParams{};
const Grid kGrid(1024, 8e-3);

struct Rendered {
    Array2D<double> image;
    Grid grid;
};

// Far-field intensity of lg(ell) through the aperture, cached per (ell, orientation).
const Rendered& rendered(int ell, double orientation = 0.0) {
    static std::map<std::pair<int, double>, Rendered> cache;
    const auto key = std::make_pair(ell, orientation);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const ApertureSpec ap{ApertureShape::EquilateralTriangle, 2e-3, orientation};
        const auto focal = far_field(
            apply_mask(lg_mode(kGrid, ell, kParams.beam_waist, kParams.wavelength), triangle_mask(kGrid, ap)),
            kParams.focal_length);
        it = cache.emplace(key, Rendered{intensity(focal), focal.grid}).first;
    }
    return it->second;
}

ReadoutResult classify(int ell, double threshold = 0.3, double orientation = 0.0) {
    const auto& r = rendered(ell, orientation);
    const ApertureSpec ap{ApertureShape::EquilateralTriangle, 2e-3, orientation};
    return classify_oam(r.image, ap, r.grid, default_readout_options(kParams, ap, r.grid, threshold));
}

Array2D<double> gaussian_spots(const Grid& g, const std::vector<std::array<double, 3>>& spots, double sigma) {
    Array2D<double> img(g.n());
    for (std::size_t r = 0; r < g.n(); ++r)
        for (std::size_t c = 0; c < g.n(); ++c)
            for (const auto& s : spots) {
                const double dx = g.coord(c) - s[0], dy = g.coord(r) - s[1];
                img(r, c) += s[2] * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            }
    return img;
}

PeakSet peaks_at(const std::vector<std::pair<double, double>>& xy) {
    PeakSet s;
    for (const auto& [x, y] : xy) s.peaks.push_back({x, y, 1.0, 0, 0});
    return s;
}

}  // namespace

TEST(find_peaks, single_gaussian) {
    const Grid g(128, 1e-3);
    const double cx = g.coord(70), cy = g.coord(50);
    const auto set = find_peaks(gaussian_spots(g, {{cx, cy, 1.0}}, 4 * g.pitch()), 0.3, 2 * g.pitch(), g);
    ASSERT_EQ(set.size(), 1u);
    EXPECT_EQ(set.peaks[0].row, 50u);
    EXPECT_EQ(set.peaks[0].col, 70u);
    EXPECT_DOUBLE_EQ(set.peaks[0].x, cx);
}

TEST(find_peaks, two_gaussians_and_ordering) {
    const Grid g(128, 1e-3);
    const double sep = 4 * g.pitch();
    const auto img = gaussian_spots(g, {{g.coord(64), g.coord(80), 1.0}, {g.coord(64), g.coord(80 - 12), 1.0}},
                                    2 * g.pitch());
    const auto set = find_peaks(img, 0.3, sep, g);
    ASSERT_EQ(set.size(), 2u);
    // Equal values: row-major order puts the smaller row first.
    EXPECT_EQ(set.peaks[0].row, 68u);
    EXPECT_EQ(set.peaks[1].row, 80u);
    EXPECT_EQ(set.threshold_frac, 0.3);
    EXPECT_EQ(set.min_separation, sep);
}

TEST(find_peaks, separation_pruning_keeps_brighter) {
    const Grid g(128, 1e-3);
    const auto img = gaussian_spots(g, {{g.coord(64), g.coord(64), 1.0}, {g.coord(70), g.coord(64), 0.8}},
                                    1.0 * g.pitch());
    EXPECT_EQ(find_peaks(img, 0.3, 2 * g.pitch(), g).size(), 2u);
    const auto pruned = find_peaks(img, 0.3, 10 * g.pitch(), g);
    ASSERT_EQ(pruned.size(), 1u);
    EXPECT_EQ(pruned.peaks[0].col, 64u);
}

TEST(find_peaks, threshold_excludes_weak_peaks) {
    const Grid g(128, 1e-3);
    const auto img = gaussian_spots(g, {{g.coord(40), g.coord(40), 1.0}, {g.coord(90), g.coord(90), 0.25}},
                                    2 * g.pitch());
    EXPECT_EQ(find_peaks(img, 0.3, 2 * g.pitch(), g).size(), 1u);
    EXPECT_EQ(find_peaks(img, 0.2, 2 * g.pitch(), g).size(), 2u);
}

TEST(find_peaks, errors_and_empty) {
    const Grid g(64, 1e-3);
    Array2D<double> zero(64);
    EXPECT_EQ(find_peaks(zero, 0.3, 2 * g.pitch(), g).size(), 0u);
    EXPECT_THROW(find_peaks(zero, 0.0, 2 * g.pitch(), g), std::invalid_argument);
    EXPECT_THROW(find_peaks(zero, 1.0, 2 * g.pitch(), g), std::invalid_argument);
    EXPECT_THROW(find_peaks(zero, 0.3, 1.5 * g.pitch(), g), std::invalid_argument);
    EXPECT_THROW(find_peaks(Array2D<double>(128), 0.3, 2 * g.pitch(), g), std::invalid_argument);
    Array2D<double> nan(64);
    nan(3, 3) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(find_peaks(nan, 0.3, 2 * g.pitch(), g), std::invalid_argument);
}

TEST(count_spots_per_side, triangular_numbers) {
    EXPECT_EQ(count_spots_per_side(peaks_at({{0, 0}})), 1);
    EXPECT_EQ(count_spots_per_side(peaks_at({{0, 0}, {1, 0}, {2, 0}})), 2);
    EXPECT_EQ(count_spots_per_side(peaks_at({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}})), 3);
    try {
        count_spots_per_side(peaks_at({{0, 0}, {1, 0}, {2, 0}, {3, 0}}));
        FAIL() << "expected a classification error";
    } catch (const ClassificationError& e) {
        EXPECT_EQ(e.kind(), ClassificationError::Kind::NonTriangularCount);
        EXPECT_EQ(e.peak_count(), 4u);
    }
    EXPECT_THROW(count_spots_per_side(PeakSet{}), ClassificationError);
}

TEST(classify_peaks, ambiguous_orientation) {
    // A lattice pointing along the aperture vertex sits a sixth of a turn from
    // both templates.
    const double r = 1e-4;
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 3; ++k) {
        const double t = kPi / 2.0 + k * 2.0 * kPi / 3.0;
        pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    try {
        classify_peaks(peaks_at(pts), ApertureSpec{});
        FAIL() << "expected an ambiguity error";
    } catch (const ClassificationError& e) {
        EXPECT_EQ(e.kind(), ClassificationError::Kind::AmbiguousOrientation);
        EXPECT_EQ(e.peak_count(), 3u);
    }
}

TEST(classify_peaks, ideal_lattices) {
    const double r = 1e-4;
    for (int side = 2; side <= 4; ++side) {
        for (int sign : {+1, -1}) {
            const double dir = kPi + (sign > 0 ? 0.0 : kPi);
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : detail::lattice_template(side, dir, r)) pts.push_back({p.x + 3e-6, p.y - 2e-6});
            const auto res = classify_peaks(peaks_at(pts), ApertureSpec{});
            EXPECT_EQ(res.magnitude, side - 1);
            EXPECT_EQ(res.signed_charge(), sign * (side - 1));
            EXPECT_GT(std::abs(res.orientation_score), 0.1);
            if (side == 2) {
                // Reflected template vertices sit one circumradius from each peak,
                // sigma = 0.25 * sqrt(3) * radius.
                const double miss = std::exp(-8.0 / 3.0);
                EXPECT_NEAR(std::abs(res.orientation_score), (1.0 - miss) / (1.0 + miss), 1e-12);
            }
        }
    }
}

TEST(classify_oam, frozen_l1_lattice) {
    const auto res = classify(1);
    ASSERT_EQ(res.peaks.size(), 3u);
    std::vector<std::pair<long, long>> offsets;
    for (const auto& p : res.peaks.peaks)
        offsets.push_back({static_cast<long>(p.row) - 512, static_cast<long>(p.col) - 512});
    std::sort(offsets.begin(), offsets.end());
    const std::vector<std::pair<long, long>> expected{{-4, 2}, {0, -5}, {4, 2}};
    EXPECT_EQ(offsets, expected);
    EXPECT_EQ(res.magnitude, 1);
    EXPECT_EQ(res.sign, SignReading::Positive);
}

TEST(classify_oam, gaussian_is_undefined) {
    const auto res = classify(0);
    EXPECT_EQ(res.magnitude, 0);
    EXPECT_EQ(res.sign, SignReading::Undefined);
    EXPECT_EQ(res.spots_per_side, 1);
    EXPECT_EQ(res.orientation_score, 0.0);
    EXPECT_EQ(res.signed_charge(), 0);
}

TEST(readout_roundtrip, examples_and_counts) {
    const ApertureSpec ap{};
    const std::pair<int, std::size_t> cases[] = {{1, 3}, {-1, 3}, {2, 6}, {-2, 6}, {3, 10}, {-3, 10}};
    for (const auto& [ell, count] : cases) {
        const auto res = readout_roundtrip(ell, kParams, kGrid, ap);
        EXPECT_EQ(res.signed_charge(), ell);
        EXPECT_EQ(res.peaks.size(), count) << ell;
        EXPECT_EQ(res.spots_per_side, std::abs(ell) + 1);
        EXPECT_GE(std::abs(res.orientation_score), kAmbiguityMargin);
    }
}

TEST(readout_properties, threshold_robustness) {
    for (int ell : {-3, -2, -1, 1, 2, 3}) {
        const auto base = classify(ell, 0.3);
        for (double t : {0.2, 0.4}) {
            const auto r = classify(ell, t);
            EXPECT_EQ(r.magnitude, base.magnitude) << ell << " @ " << t;
            EXPECT_EQ(r.sign, base.sign) << ell << " @ " << t;
        }
    }
}

TEST(readout_properties, sign_antisymmetry_under_point_reflection) {
    const ApertureSpec ap{};
    for (int ell : {1, -1, 2, -2, 3, -3}) {
        const auto& r = rendered(ell);
        const auto opts = default_readout_options(kParams, ap, r.grid);
        const auto a = classify_oam(r.image, ap, r.grid, opts);
        const auto b = classify_oam(point_reflect(r.image), ap, r.grid, opts);
        EXPECT_EQ(b.magnitude, a.magnitude);
        EXPECT_EQ(b.signed_charge(), -a.signed_charge());
    }
}

TEST(readout_properties, rotation_equivariance) {
    constexpr double third = 2.0 * kPi / 3.0;
    for (int ell : {1, -2, 3}) {
        const auto base = classify(ell);
        for (int k = 1; k <= 2; ++k) {
            const double orient = k * third;
            // The raster is invariant, so the image is identical too.
            EXPECT_EQ(rendered(ell, orient).image, rendered(ell, 0.0).image);
            const auto r = classify(ell, 0.3, orient);
            EXPECT_EQ(r.signed_charge(), base.signed_charge());

            // Rotating the detected peaks together with the aperture keeps the reading.
            PeakSet rotated = base.peaks;
            const double c = std::cos(orient), s = std::sin(orient);
            for (auto& p : rotated.peaks) p = {c * p.x - s * p.y, s * p.x + c * p.y, p.value, p.row, p.col};
            const auto rr = classify_peaks(rotated, {ApertureShape::EquilateralTriangle, 2e-3, orient});
            EXPECT_EQ(rr.signed_charge(), base.signed_charge());
            EXPECT_NEAR(rr.orientation_score, base.orientation_score, 1e-9);
        }
    }
}

TEST(readout_properties, determinism) {
    const ApertureSpec ap{};
    const auto a = readout_roundtrip(-2, kParams, kGrid, ap);
    const auto b = readout_roundtrip(-2, kParams, kGrid, ap);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.peaks, b.peaks);
}

TEST(readout_properties, peak_set_invariants) {
    for (int ell : {1, 2, 3}) {
        const auto res = classify(ell);
        double vmax = 0.0;
        for (double v : rendered(ell).image.values()) vmax = std::max(vmax, v);
        for (std::size_t i = 0; i < res.peaks.size(); ++i) {
            EXPECT_GE(res.peaks.peaks[i].value, res.peaks.threshold_frac * vmax);
            if (i > 0) {
                EXPECT_GE(res.peaks.peaks[i - 1].value, res.peaks.peaks[i].value);
            }
            for (std::size_t j = i + 1; j < res.peaks.size(); ++j) {
                const auto& p = res.peaks.peaks[i];
                const auto& q = res.peaks.peaks[j];
                EXPECT_GE(std::hypot(p.x - q.x, p.y - q.y), res.peaks.min_separation);
            }
        }
    }
}
