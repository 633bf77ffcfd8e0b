#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oamcnot {

/// Square row-major sample array. Row index runs along y, column index along x.
template <class T>
class Array2D {
public:
    Array2D() = default;
    explicit Array2D(std::size_t n, const T& fill = T{}) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }
    std::size_t count() const { return data_.size(); }

    T& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
    const T& operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }
    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    friend bool operator==(const Array2D&, const Array2D&) = default;

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

/// Point reflection through the grid center (index n/2): (r, c) -> (n - r, n - c) mod n.
template <class T>
Array2D<T> point_reflect(const Array2D<T>& a) {
    const std::size_t n = a.size();
    Array2D<T> out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) out((n - r) % n, (n - c) % n) = a(r, c);
    return out;
}

}  // namespace oamcnot
