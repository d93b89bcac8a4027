#include "spraylab/involutivity.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spraylab {

namespace {

std::size_t u(int i) { return static_cast<std::size_t>(i); }

using Vec = std::vector<double>;

Vec natural_basis(int n, int slot)
{
    Vec v(u(2 * n), 0.0);
    v[u(slot)] = 1.0;
    return v;
}

// One codomain component of σ¹: Σ sign · A(vector, ∂x_m).
struct Term
{
    double sign;
    Vec vector;
    int m;
};
using Row = std::vector<Term>;

DenseMatrix numeric_connection(const Spray& S, const Point& p)
{
    const Connection c = connection(S);
    DenseMatrix N(u(S.n), Vec(u(S.n)));
    for (int i = 0; i < S.n; ++i)
        for (int j = 0; j < S.n; ++j) N[u(i)][u(j)] = eval(c.N[u(i)][u(j)], p);
    return N;
}

// Horizontal lift δ/δx^i = ∂x_i − N^k_i ∂y_k.
Vec horizontal(int n, const DenseMatrix& N, int i)
{
    Vec v = natural_basis(n, i);
    for (int k = 0; k < n; ++k) v[u(n + k)] = -N[u(k)][u(i)];
    return v;
}

Vec liouville_at(const Point& p)
{
    const int n = p.dim();
    Vec v(u(2 * n), 0.0);
    for (int k = 0; k < n; ++k) v[u(n + k)] = p.y[u(k)];
    return v;
}

Vec spray_at(const Spray& S, const Point& p)
{
    const int n = S.n;
    Vec v(u(2 * n));
    for (int k = 0; k < n; ++k) {
        v[u(k)] = p.y[u(k)];
        v[u(n + k)] = -2.0 * eval(S.G[u(k)], p);
    }
    return v;
}

std::vector<Row> sigma1_rows(const Spray& S, const Point& p)
{
    const int n = S.n;
    const DenseMatrix N = numeric_connection(S, p);
    std::vector<Row> rows;
    const Vec C = liouville_at(p);
    for (int m = 0; m < n; ++m) rows.push_back({{1.0, C, m}});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) rows.push_back({{1.0, natural_basis(n, n + i), j}, {-1.0, natural_basis(n, n + j), i}});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) rows.push_back({{1.0, horizontal(n, N, i), j}, {-1.0, horizontal(n, N, j), i}});
    return rows;
}

class FrameSolver
{
public:
    explicit FrameSolver(const Frame& frame)
    {
        const int m = static_cast<int>(frame.size());
        Eigen::MatrixXd E(m, m);
        for (int r = 0; r < m; ++r) {
            if (static_cast<int>(frame[u(r)].size()) != m) throw std::invalid_argument("frame must be square");
            for (int c = 0; c < m; ++c) E(r, c) = frame[u(r)][u(c)];
        }
        lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(E);
        if (std::abs(lu_.determinant()) < 1e-12) throw std::invalid_argument("frame is singular");
    }

    Vec coords(const Vec& v) const
    {
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        Eigen::VectorXd c = lu_.solve(b);
        return Vec(c.data(), c.data() + c.size());
    }

private:
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

int sym_index(int dim, int a, int b)
{
    if (a > b) std::swap(a, b);
    // position of (a, b), a ≤ b, in row-major upper triangle
    return a * dim - a * (a - 1) / 2 + (b - a);
}

void track(DimensionReport& r, const RankInfo& info)
{
    r.indeterminate = r.indeterminate || info.ill_conditioned;
    if (info.rank > 0) r.min_retained_ratio = std::min(r.min_retained_ratio, info.smallest_retained_ratio);
    r.max_discarded_ratio = std::max(r.max_discarded_ratio, info.largest_discarded_ratio);
}

CartanBasisResult run_basis(DimensionReport& report, const SymbolMatrix& s1, const FrameSolver& solver,
                            const std::vector<Vec>& basis)
{
    const int n = report.n;
    CartanBasisResult out;
    DenseMatrix m = s1.matrix;
    for (int j = 0; j < n; ++j) {
        const Vec c = solver.coords(basis[u(j)]);
        for (int q = 0; q < n; ++q) {
            Vec row(u(s1.domain_dim), 0.0);
            for (int a = 0; a < 2 * n; ++a) row[u(sigma1_column(n, a, q))] = c[u(a)];
            m.push_back(std::move(row));
        }
        const RankInfo info = numeric_rank(m);
        track(report, info);
        out.dims.push_back(info.nullity());
        out.sum += info.nullity();
    }
    out.equality = report.dim_g2 == report.dim_g1 + out.sum;
    return out;
}

} // namespace

int sigma1_column(int n, int a, int m) { return a * n + m; }

Frame adapted_frame(const Spray& S, const Point& p)
{
    const int n = S.n;
    const DenseMatrix N = numeric_connection(S, p);
    Frame E(u(2 * n), Vec(u(2 * n), 0.0));
    for (int i = 0; i < n; ++i) {
        const Vec h = horizontal(n, N, i);
        for (int r = 0; r < 2 * n; ++r) E[u(r)][u(i)] = h[u(r)];
        E[u(n + i)][u(n + i)] = 1.0;
    }
    return E;
}

SymbolMatrix sigma1_matrix(const Spray& S, const Point& p) { return sigma1_matrix(S, p, adapted_frame(S, p)); }

SymbolMatrix sigma1_matrix(const Spray& S, const Point& p, const Frame& frame)
{
    const int n = S.n;
    if (p.dim() != n) throw std::invalid_argument("sigma1_matrix: point dimension mismatch");
    const FrameSolver solver(frame);
    SymbolMatrix out;
    out.point = p;
    out.domain_dim = 2 * n * n;
    for (const Row& row : sigma1_rows(S, p)) {
        Vec r(u(out.domain_dim), 0.0);
        for (const Term& t : row) {
            const Vec c = solver.coords(t.vector);
            for (int a = 0; a < 2 * n; ++a) r[u(sigma1_column(n, a, t.m))] += t.sign * c[u(a)];
        }
        out.matrix.push_back(std::move(r));
    }
    out.codomain_dim = static_cast<int>(out.matrix.size());
    return out;
}

SymbolMatrix sigma2_matrix(const Spray& S, const Point& p) { return sigma2_matrix(S, p, adapted_frame(S, p)); }

SymbolMatrix sigma2_matrix(const Spray& S, const Point& p, const Frame& frame)
{
    const int n = S.n;
    const int dim = 2 * n;
    if (p.dim() != n) throw std::invalid_argument("sigma2_matrix: point dimension mismatch");
    const FrameSolver solver(frame);
    const int pairs = dim * (dim + 1) / 2;
    SymbolMatrix out;
    out.point = p;
    out.domain_dim = pairs * n;
    const std::vector<Row> rows = sigma1_rows(S, p);
    for (int q = 0; q < dim; ++q) {
        const Vec cx = solver.coords(natural_basis(n, q));
        for (const Row& row : rows) {
            Vec r(u(out.domain_dim), 0.0);
            for (const Term& t : row) {
                const Vec cy = solver.coords(t.vector);
                for (int a = 0; a < dim; ++a)
                    for (int b = 0; b < dim; ++b) {
                        const double w = t.sign * cx[u(a)] * cy[u(b)];
                        if (w != 0.0) r[u(sym_index(dim, a, b) * n + t.m)] += w;
                    }
            }
            out.matrix.push_back(std::move(r));
        }
    }
    out.codomain_dim = static_cast<int>(out.matrix.size());
    return out;
}

bool DimensionReport::matches_expected() const
{
    return dim_g1 == expected_g1 && dim_g2 == expected_g2 && quasi_regular.dims == expected_dims;
}

DimensionReport cartan_test(const Spray& S, const Point& p)
{
    const int n = S.n;
    DimensionReport report;
    report.n = n;
    report.point = p;
    report.expected_g1 = n * n;
    report.expected_g2 = n * n * (n + 1) / 2;
    for (int j = 1; j <= n; ++j) report.expected_dims.push_back(n * (n - j));

    const Frame frame = adapted_frame(S, p);
    const FrameSolver solver(frame);
    const SymbolMatrix s1 = sigma1_matrix(S, p, frame);
    const SymbolMatrix s2 = sigma2_matrix(S, p, frame);
    const RankInfo r1 = numeric_rank(s1.matrix);
    const RankInfo r2 = numeric_rank(s2.matrix);
    track(report, r1);
    track(report, r2);
    report.dim_g1 = r1.nullity();
    report.dim_g2 = r2.nullity();

    // Frame with Jh_i = v_i and v_n = ℂ: h_n = S, and the remaining pairs
    // are (δ/δx^k, ∂/∂y^k) for k ≠ argmax |y^k|, so that the frame stays
    // well conditioned.
    const DenseMatrix N = numeric_connection(S, p);
    int pivot = 0;
    for (int k = 1; k < n; ++k)
        if (std::abs(p.y[u(k)]) > std::abs(p.y[u(pivot)])) pivot = k;
    std::vector<Vec> h, v;
    for (int k = 0; k < n; ++k) {
        if (k == pivot) continue;
        h.push_back(horizontal(n, N, k));
        v.push_back(natural_basis(n, n + k));
    }
    h.push_back(spray_at(S, p));
    v.push_back(liouville_at(p));

    std::vector<Vec> shifted, plain;
    for (int j = 0; j < n; ++j) {
        Vec e = h[u(j)];
        if (j > 0)
            for (int r = 0; r < 2 * n; ++r) e[u(r)] += v[u(j - 1)][u(r)];
        shifted.push_back(std::move(e));
        plain.push_back(h[u(j)]);
    }
    report.quasi_regular = run_basis(report, s1, solver, shifted);
    report.unshifted = run_basis(report, s1, solver, plain);
    return report;
}

} // namespace spraylab
