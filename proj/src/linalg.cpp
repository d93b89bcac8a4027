#include "spraylab/linalg.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace spraylab {

RankInfo numeric_rank(const DenseMatrix& m, double rel_threshold)
{
    RankInfo info;
    info.rows = static_cast<int>(m.size());
    info.cols = m.empty() ? 0 : static_cast<int>(m.front().size());
    if (info.rows == 0 || info.cols == 0) return info;

    Eigen::MatrixXd a(info.rows, info.cols);
    for (int r = 0; r < info.rows; ++r) {
        const auto& row = m[static_cast<std::size_t>(r)];
        if (static_cast<int>(row.size()) != info.cols) throw std::invalid_argument("numeric_rank: ragged matrix");
        for (int c = 0; c < info.cols; ++c) a(r, c) = row[static_cast<std::size_t>(c)];
    }

    const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const Eigen::VectorXd s = svd.singularValues();
    info.singular_values.assign(s.data(), s.data() + s.size());
    info.sigma_max = s.size() ? s(0) : 0.0;
    if (info.sigma_max == 0.0) return info;

    info.threshold = rel_threshold * info.sigma_max;
    bool discarded = false;
    for (double v : info.singular_values) {
        const double ratio = v / info.sigma_max;
        if (v > info.threshold) {
            ++info.rank;
            info.smallest_retained_ratio = ratio;
        } else if (!discarded) {
            discarded = true;
            info.largest_discarded_ratio = ratio;
        }
        if (ratio >= 1e-12 && ratio <= 1e-6) info.ill_conditioned = true;
    }
    return info;
}

} // namespace spraylab
