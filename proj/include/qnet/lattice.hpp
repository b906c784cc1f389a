#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace qnet {

enum class Boundary { periodic, open };

inline const char* to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open"; }

inline Boundary boundary_from_string(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "open") return Boundary::open;
    throw ValidationError("lattice.boundary", "must be 'periodic' or 'open'");
}

struct Site {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(const Site&, const Site&) = default;
};

// Square L x L lattice. L = 1 is accepted as the degenerate single-site net
// (the kinetic coupling vanishes identically there).
struct LatticeConfig {
    std::size_t size = 20;
    Boundary boundary = Boundary::periodic;
    double spacing = 1.0;

    std::size_t sites() const noexcept { return size * size; }

    void validate() const {
        if (size < 1) throw ValidationError("lattice.L", "must be >= 1");
        if (!(spacing > 0.0)) throw ValidationError("lattice.spacing", "must be > 0");
    }

    std::size_t index(Site s) const noexcept { return s.row * size + s.col; }
    Site site(std::size_t i) const noexcept { return {i / size, i % size}; }

    void check(Site s) const {
        if (s.row >= size || s.col >= size)
            throw IndexError("site (" + std::to_string(s.row) + "," + std::to_string(s.col) +
                             ") outside " + std::to_string(size) + "x" + std::to_string(size) +
                             " lattice");
    }

    friend bool operator==(const LatticeConfig&, const LatticeConfig&) = default;
};

// Row-major L x L grid of values.
template <typename T>
class Grid {
public:
    Grid() = default;
    explicit Grid(std::size_t L, T fill = T{}) : size_(L), data_(L * L, fill) {}

    std::size_t size() const noexcept { return size_; }
    std::size_t count() const noexcept { return data_.size(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * size_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * size_ + c]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    const std::vector<T>& values() const noexcept { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t size_ = 0;
    std::vector<T> data_;
};

template <typename T>
void require_shape(const Grid<T>& g, const LatticeConfig& cfg, const char* what) {
    if (g.size() != cfg.size)
        throw ShapeError(std::string(what) + ": grid is " + std::to_string(g.size()) + "x" +
                         std::to_string(g.size()) + ", lattice is " + std::to_string(cfg.size) +
                         "x" + std::to_string(cfg.size));
}

// Nearest-neighbour bonds of the stencil: each site's right and down
// neighbour, wrapped under periodic boundaries. Self-bonds (L = 1) are
// dropped. For periodic L = 2 the same pair appears twice, matching the
// doubled neighbour count of the five-point stencil.
inline std::vector<std::pair<std::size_t, std::size_t>> stencil_bonds(const LatticeConfig& cfg) {
    std::vector<std::pair<std::size_t, std::size_t>> bonds;
    const std::size_t L = cfg.size;
    const bool wrap = cfg.boundary == Boundary::periodic;
    for (std::size_t r = 0; r < L; ++r) {
        for (std::size_t c = 0; c < L; ++c) {
            const std::size_t i = r * L + c;
            if (c + 1 < L || wrap) {
                const std::size_t j = r * L + (c + 1) % L;
                if (j != i) bonds.emplace_back(i, j);
            }
            if (r + 1 < L || wrap) {
                const std::size_t j = ((r + 1) % L) * L + c;
                if (j != i) bonds.emplace_back(i, j);
            }
        }
    }
    return bonds;
}

// Distinct unordered neighbour pairs (a < b), the lattice graph proper.
inline std::vector<std::pair<std::size_t, std::size_t>> neighbor_pairs(const LatticeConfig& cfg) {
    auto out = stencil_bonds(cfg);
    for (auto& [a, b] : out)
        if (a > b) std::swap(a, b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace qnet
