#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace evdet {

// Sparse numeric vector over a fixed-dimension feature space. Entries are
// sorted by column index and never store zeros.
struct SparseVector {
    std::vector<std::pair<std::size_t, double>> entries;
    std::size_t dimension = 0;

    double value_at(std::size_t index) const {
        for (const auto& [i, v] : entries)
            if (i == index) return v;
        return 0.0;
    }

    std::size_t nnz() const { return entries.size(); }

    bool operator==(const SparseVector&) const = default;
};

inline double dot(const std::vector<double>& weights, const SparseVector& x) {
    double sum = 0.0;
    for (const auto& [i, v] : x.entries) sum += weights[i] * v;
    return sum;
}

}  // namespace evdet
