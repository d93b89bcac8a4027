#pragma once

#include <vector>

namespace spraylab {

using DenseMatrix = std::vector<std::vector<double>>; // row-major, rectangular

struct RankInfo
{
    int rows = 0;
    int cols = 0;
    int rank = 0;
    std::vector<double> singular_values; // descending
    double sigma_max = 0.0;
    double threshold = 0.0;   // rel_threshold · σ_max
    /// Smallest ratio σ_{rank}/σ_max among retained values, 1 when rank = 0.
    double smallest_retained_ratio = 1.0;
    /// Largest ratio σ_{rank+1}/σ_max among discarded values, 0 when none.
    double largest_discarded_ratio = 0.0;
    /// Some σ/σ_max lies in the grey zone [1e-12, 1e-6].
    bool ill_conditioned = false;

    int nullity() const { return cols - rank; }
};

/// Numerical rank from singular values: σ > rel_threshold·σ_max.
RankInfo numeric_rank(const DenseMatrix& m, double rel_threshold = 1e-9);

} // namespace spraylab
