#include "taxisfv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace taxisfv {

Grid1D Grid1D::uniform(double a, double b, std::size_t n) {
    if (!(a < b)) {
        throw std::invalid_argument("Grid1D: domain requires a < b");
    }
    if (n < kMinCells) {
        throw std::invalid_argument("Grid1D: at least " + std::to_string(kMinCells) +
                                    " cells are needed for the 5-point stencils");
    }
    return from_levels(a, b, n, std::vector<int>(n, 0), 0);
}

Grid1D Grid1D::from_levels(double a, double b, std::size_t base_cells, std::vector<int> levels,
                           std::uint64_t revision) {
    if (!(a < b)) {
        throw std::invalid_argument("Grid1D: domain requires a < b");
    }
    if (base_cells < 1) {
        throw std::invalid_argument("Grid1D: base partition is empty");
    }
    Grid1D g;
    g.a_ = a;
    g.b_ = b;
    g.base_cells_ = base_cells;
    g.h_base_ = (b - a) / static_cast<double>(base_cells);
    g.revision_ = revision;
    g.levels_ = std::move(levels);

    g.offsets_.resize(g.levels_.size());
    std::int64_t pos = 0;
    for (std::size_t i = 0; i < g.levels_.size(); ++i) {
        const int L = g.levels_[i];
        if (L < 0 || L > kMaxRefinementDepth) {
            throw std::invalid_argument("Grid1D: refinement level out of range");
        }
        const std::int64_t w = units_per_level(L);
        if (pos % w != 0) {
            throw std::invalid_argument("Grid1D: levels do not form a dyadic partition");
        }
        g.offsets_[i] = pos;
        pos += w;
    }
    if (pos != static_cast<std::int64_t>(base_cells) * units_per_level(0)) {
        throw std::invalid_argument("Grid1D: levels do not cover the domain");
    }
    if (g.levels_.size() < kMinCells) {
        throw std::invalid_argument("Grid1D: fewer cells than the minimum stencil width");
    }
    g.rebuild_geometry();
    return g;
}

Grid1D Grid1D::with_levels(std::vector<int> levels) const {
    return from_levels(a_, b_, base_cells_, std::move(levels), revision_ + 1);
}

void Grid1D::rebuild_geometry() {
    const std::size_t n = levels_.size();
    const double unit = h_base_ / static_cast<double>(units_per_level(0));
    widths_.resize(n);
    interfaces_.resize(n + 1);
    centers_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        widths_[i] = std::ldexp(h_base_, -levels_[i]);
        interfaces_[i] = a_ + static_cast<double>(offsets_[i]) * unit;
    }
    interfaces_[n] = b_;
    for (std::size_t i = 0; i < n; ++i) {
        centers_[i] = interfaces_[i] + 0.5 * widths_[i];
    }
}

int Grid1D::max_level() const noexcept {
    return levels_.empty() ? 0 : *std::max_element(levels_.begin(), levels_.end());
}

bool Grid1D::is_uniform() const noexcept {
    return std::all_of(levels_.begin(), levels_.end(),
                       [&](int L) { return L == levels_.front(); });
}

bool Grid1D::are_siblings(std::size_t i) const {
    if (i + 1 >= levels_.size()) return false;
    const int L = levels_[i];
    if (L < 1 || levels_[i + 1] != L) return false;
    // The left daughter starts on an even multiple of its own width.
    return (offsets_[i] / units_per_level(L)) % 2 == 0;
}

std::size_t Grid1D::locate(double x) const {
    if (x <= a_) return 0;
    if (x >= b_) return size() - 1;
    auto it = std::upper_bound(interfaces_.begin(), interfaces_.end(), x);
    const auto idx = static_cast<std::size_t>(std::distance(interfaces_.begin(), it));
    return std::min(idx == 0 ? 0 : idx - 1, size() - 1);
}

int to_flat(int i, int j, int L, int M) {
    if (L < 1 || M < 1 || i < 1 || i > L || j < 1 || j > M) {
        throw std::out_of_range("to_flat: index pair outside the grid");
    }
    return i + (j - 1) * L;
}

std::pair<int, int> to_pair(int k, int L, int M) {
    if (L < 1 || M < 1 || k < 1 || k > L * M) {
        throw std::out_of_range("to_pair: flat index outside the grid");
    }
    const int row = (k - 1) / L;  // floor for positive operands
    return {k - row * L, row + 1};
}

std::optional<int> neighbor_2d(int k, Direction d, int L, int M) {
    if (L < 1 || M < 1 || k < 1 || k > L * M) {
        throw std::out_of_range("neighbor_2d: flat index outside the grid");
    }
    switch (d) {
        case Direction::PlusE1:
            if (k % L == 0) return std::nullopt;
            return k + 1;
        case Direction::MinusE1:
            if ((k - 1) % L == 0) return std::nullopt;
            return k - 1;
        case Direction::PlusE2:
            if (k > L * (M - 1)) return std::nullopt;
            return k + L;
        case Direction::MinusE2:
            if (k < L + 1) return std::nullopt;
            return k - L;
    }
    return std::nullopt;
}

Grid2D Grid2D::square(double a, double b, int L, int M) {
    if (!(a < b)) {
        throw std::invalid_argument("Grid2D: domain requires a < b");
    }
    if (L < 5 || M < 5) {
        throw std::invalid_argument("Grid2D: at least 5 cells per direction are required");
    }
    Grid2D g;
    g.a_ = a;
    g.b_ = b;
    g.L_ = L;
    g.M_ = M;
    g.hx_ = (b - a) / L;
    g.hy_ = (b - a) / M;
    return g;
}

std::vector<double> StateField::species(std::size_t s) const {
    std::vector<double> out(cells_);
    for (std::size_t i = 0; i < cells_; ++i) out[i] = values_[i * species_ + s];
    return out;
}

double StateField::min_value() const {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

}  // namespace taxisfv
