#pragma once

// Thin RAII layer over FFTW for square 2D complex transforms.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>
#include <stdexcept>

#include "oamcnot/array2d.hpp"

namespace oamcnot::fft {

namespace detail {

// FFTW's planner is not reentrant.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

}  // namespace detail

/// Unnormalized forward DFT, exp(-2 pi i k m / n) kernel, in place on a copy.
/// Buffers come from fftw_malloc so the alignment (and therefore the chosen
/// codelets) is the same on every call.
inline Array2D<std::complex<double>> forward(const Array2D<std::complex<double>>& in) {
    const std::size_t n = in.size();
    const std::size_t count = in.count();
    std::unique_ptr<fftw_complex, detail::FftwFree> buf(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count)));
    if (!buf) throw std::bad_alloc();

    std::unique_ptr<fftw_plan_s, detail::PlanDestroy> plan;
    {
        std::lock_guard lock(detail::planner_mutex());
        plan.reset(fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf.get(), buf.get(),
                                    FFTW_FORWARD, FFTW_ESTIMATE));
    }
    if (!plan) throw std::runtime_error("FFTW failed to create a plan");

    std::memcpy(buf.get(), in.data(), sizeof(fftw_complex) * count);
    fftw_execute(plan.get());

    Array2D<std::complex<double>> out(n);
    std::memcpy(static_cast<void*>(out.data()), buf.get(), sizeof(fftw_complex) * count);
    return out;
}

/// Swaps quadrants so index n/2 <-> 0. For even n this is both fftshift and ifftshift.
template <class T>
Array2D<T> swap_quadrants(const Array2D<T>& a) {
    const std::size_t n = a.size();
    const std::size_t h = n / 2;
    Array2D<T> out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) out((r + h) % n, (c + h) % n) = a(r, c);
    return out;
}

/// DFT with both sample and frequency indices centered on n/2.
inline Array2D<std::complex<double>> centered_forward(const Array2D<std::complex<double>>& in) {
    return swap_quadrants(forward(swap_quadrants(in)));
}

}  // namespace oamcnot::fft
