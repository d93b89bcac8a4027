#include "doctest.h"

#include "spraylab/involutivity.hpp"
#include "spraylab/presets.hpp"

#include <random>

using namespace spraylab;

TEST_CASE("sigma1 shape and nullity")
{
    for (const int n : {2, 3, 4}) {
        const Spray S = preset(n == 2 ? "anderson-thompson" : "yang(lambda=0.5,n=" + std::to_string(n) + ")").spray;
        const Point p = sample_points(n, 1, 5)[0];
        const SymbolMatrix s1 = sigma1_matrix(S, p);
        CHECK(s1.domain_dim == 2 * n * n);
        CHECK(s1.codomain_dim == n + n * (n - 1));
        const RankInfo r = numeric_rank(s1.matrix);
        CHECK(r.nullity() == n * n);
        CHECK(r.rank == s1.codomain_dim); // full row rank
        CHECK_FALSE(r.ill_conditioned);
    }
}

TEST_CASE("sigma2 shape and nullity")
{
    for (const int n : {2, 3, 4}) {
        const Spray S = preset("flat(n=" + std::to_string(n) + ")").spray;
        const Point p = sample_points(n, 1, 6)[0];
        const SymbolMatrix s2 = sigma2_matrix(S, p);
        CHECK(s2.domain_dim == 2 * n * n * n + n * n);
        CHECK(numeric_rank(s2.matrix).nullity() == n * n * (n + 1) / 2);
    }
    // n = 6: 468 free components.
    const Point p6 = sample_points(6, 1, 1)[0];
    CHECK(sigma2_matrix(preset("flat(n=6)").spray, p6).domain_dim == 468);
}

TEST_CASE("cartan test examples")
{
    {
        const DimensionReport r = cartan_test(preset("flat2").spray, sample_points(2, 1)[0]);
        CHECK(r.dim_g1 == 4);
        CHECK(r.dim_g2 == 6);
        CHECK(r.quasi_regular.dims == std::vector<int>{2, 0});
        CHECK(r.quasi_regular.sum == 2);
        CHECK(r.verdict());
        CHECK(r.matches_expected());
    }
    {
        const DimensionReport r = cartan_test(preset("flat3").spray, sample_points(3, 1)[0]);
        CHECK(r.dim_g1 == 9);
        CHECK(r.dim_g2 == 18);
        CHECK(r.quasi_regular.dims == std::vector<int>{6, 3, 0});
        CHECK(r.verdict());
    }
    {
        // Unshifted basis, reported honestly.
        const DimensionReport r = cartan_test(preset("anderson-thompson").spray, sample_points(2, 1)[0]);
        CHECK(r.verdict());
        CHECK(r.unshifted.dims.size() == 2);
        MESSAGE("unshifted dims n=2: " << r.unshifted.dims[0] << ", " << r.unshifted.dims[1]);
        CHECK_FALSE(r.unshifted.equality);
    }
}

TEST_CASE("dimension counts are point-independent across presets")
{
    for (const char* name : {"flat2", "anderson-thompson", "yang(lambda=0.5)", "riemannian", "flat3",
                             "yang(lambda=0.5,n=3)", "flat(n=4)", "yang(lambda=0.5,n=4)"}) {
        const Spray S = preset(name).spray;
        for (const auto& p : sample_points(S.n, 10, 17)) {
            const DimensionReport r = cartan_test(S, p);
            CHECK_MESSAGE(r.matches_expected(), name);
            CHECK_MESSAGE(r.verdict(), name);
        }
    }
}

TEST_CASE("nullities do not depend on the frame")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const Spray S = preset("riemannian").spray;
    const Point p = sample_points(2, 1, 12)[0];
    const Frame adapted = adapted_frame(S, p);
    for (int t = 0; t < 5; ++t) {
        // random invertible change of the horizontal part: h'_i = Σ_k M_ki h_k
        DenseMatrix M(2, std::vector<double>(2));
        for (auto& row : M)
            for (auto& v : row) v = d(rng);
        M[0][0] += 2.0;
        M[1][1] += 2.0;
        Frame f = adapted;
        for (int r = 0; r < 4; ++r)
            for (int i = 0; i < 2; ++i) f[r][i] = adapted[r][0] * M[0][i] + adapted[r][1] * M[1][i];
        CHECK(numeric_rank(sigma1_matrix(S, p, f).matrix).nullity() == 4);
        CHECK(numeric_rank(sigma2_matrix(S, p, f).matrix).nullity() == 6);
    }
    // the natural frame
    Frame natural(4, std::vector<double>(4, 0.0));
    for (int i = 0; i < 4; ++i) natural[i][i] = 1.0;
    CHECK(numeric_rank(sigma1_matrix(S, p, natural).matrix).nullity() == 4);
    CHECK(numeric_rank(sigma2_matrix(S, p, natural).matrix).nullity() == 6);
}

TEST_CASE("kernel membership oracle")
{
    // A_{ij} symmetric, A_{i̲j} symmetric with A_{i̲j} y^j = 0, in the adapted frame.
    const int n = 3;
    const Spray S = preset("yang(lambda=0.5,n=3)").spray;
    const Point p = sample_points(n, 1, 4)[0];
    const SymbolMatrix s1 = sigma1_matrix(S, p);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> d(-1.0, 1.0);

    std::vector<double> alpha(static_cast<std::size_t>(s1.domain_dim), 0.0);
    auto at = [&](int a, int m) -> double& { return alpha[static_cast<std::size_t>(sigma1_column(n, a, m))]; };
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) at(i, j) = at(j, i) = d(rng);
    // vertical block: b = P M P with P the projector orthogonal to y, M symmetric
    double yy = 0.0;
    for (double v : p.y) yy += v * v;
    std::vector<std::vector<double>> P(n, std::vector<double>(n)), M(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P[i][j] = (i == j ? 1.0 : 0.0) - p.y[i] * p.y[j] / yy;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) M[i][j] = M[j][i] = d(rng);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += P[i][k] * M[k][l] * P[l][j];
            at(n + i, j) = acc;
        }
    for (const auto& row : s1.matrix) {
        double dot = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) dot += row[c] * alpha[c];
        CHECK(std::abs(dot) < 1e-12);
    }
    // an asymmetric horizontal block is not in the kernel
    at(0, 1) += 1.0;
    double worst = 0.0;
    for (const auto& row : s1.matrix) {
        double dot = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) dot += row[c] * alpha[c];
        worst = std::max(worst, std::abs(dot));
    }
    CHECK(worst > 0.5);
}

TEST_CASE("numeric_rank")
{
    CHECK(numeric_rank({}).rank == 0);
    CHECK(numeric_rank({{0.0, 0.0}}).rank == 0);
    const RankInfo r = numeric_rank({{1.0, 0.0}, {0.0, 1e-8}});
    CHECK(r.rank == 2);
    CHECK(r.ill_conditioned);
    const RankInfo q = numeric_rank({{1.0, 2.0}, {2.0, 4.0}});
    CHECK(q.rank == 1);
    CHECK(q.nullity() == 1);
    CHECK_FALSE(q.ill_conditioned);
}
