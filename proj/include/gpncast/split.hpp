#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gpncast/common.hpp"
#include "gpncast/features.hpp"
#include "gpncast/rng.hpp"

namespace gpncast {

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Random disjoint-exhaustive partition: |train| = floor(fraction * n).
/// Deterministic for a fixed seed.
inline SplitIndices split_indices(std::size_t n, double fraction,
                                  std::uint64_t seed) {
    if (n < 2) throw ValidationError("split: need at least 2 rows");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ValidationError("split: fraction must be in (0,1)");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    const auto n_train =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return out;
}

inline FeatureMatrix take_rows(const FeatureMatrix& m,
                               const std::vector<std::size_t>& idx) {
    FeatureMatrix out;
    out.column_names = m.column_names;
    out.target_transform = m.target_transform;
    out.schema_fingerprint = m.schema_fingerprint;
    out.rows.reserve(idx.size());
    out.target.reserve(idx.size());
    for (std::size_t i : idx) {
        out.rows.push_back(m.rows.at(i));
        out.target.push_back(m.target.at(i));
    }
    return out;
}

inline std::pair<FeatureMatrix, FeatureMatrix> split(const FeatureMatrix& m,
                                                     double fraction,
                                                     std::uint64_t seed) {
    const SplitIndices idx = split_indices(m.n_rows(), fraction, seed);
    return {take_rows(m, idx.train), take_rows(m, idx.test)};
}

}  // namespace gpncast
