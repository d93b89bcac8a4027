#include "spraylab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace spraylab {

namespace {

using Vec = std::vector<double>;

std::size_t u(int i) { return static_cast<std::size_t>(i); }

double norm(const Vec& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

Vec accel(const Spray& S, const Vec& x, const Vec& y)
{
    const Point p{x, y};
    Vec a(u(S.n));
    for (int i = 0; i < S.n; ++i) a[u(i)] = -2.0 * eval(S.G[u(i)], p);
    return a;
}

Vec axpy(const Vec& a, double s, const Vec& b)
{
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * b[i];
    return r;
}

Vec geodesic_coefficients(const Spray& S, const Point& p)
{
    Vec g(u(S.n));
    for (int i = 0; i < S.n; ++i) g[u(i)] = eval(S.G[u(i)], p);
    return g;
}

// Value of the polyline `xs` at arclength `s` on nodes `arc`.
Vec interpolate(const std::vector<double>& arc, const std::vector<Vec>& xs, double s)
{
    auto it = std::upper_bound(arc.begin(), arc.end(), s);
    if (it == arc.begin()) return xs.front();
    if (it == arc.end()) return xs.back();
    const std::size_t k = static_cast<std::size_t>(it - arc.begin());
    const double ds = arc[k] - arc[k - 1];
    const double w = ds > 0.0 ? (s - arc[k - 1]) / ds : 0.0;
    Vec r(xs[k].size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (1.0 - w) * xs[k - 1][i] + w * xs[k][i];
    return r;
}

double one_sided(const std::vector<double>& arc_a, const std::vector<Vec>& xa, const std::vector<double>& arc_b,
                 const std::vector<Vec>& xb, double range)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < arc_a.size() && arc_a[k] <= range; ++k) {
        const Vec other = interpolate(arc_b, xb, arc_a[k]);
        double d = 0.0;
        for (std::size_t i = 0; i < other.size(); ++i) d += (xa[k][i] - other[i]) * (xa[k][i] - other[i]);
        worst = std::max(worst, std::sqrt(d));
    }
    return worst;
}

} // namespace

GeodesicTrace integrate(const Spray& S, std::span<const double> x0, std::span<const double> y0, double T, int steps,
                        double floor)
{
    const int n = S.n;
    if (static_cast<int>(x0.size()) != n || static_cast<int>(y0.size()) != n)
        throw std::invalid_argument("integrate: initial state has wrong dimension");
    if (steps <= 0 || !(T > 0.0)) throw std::invalid_argument("integrate: need T > 0 and steps > 0");
    Vec x(x0.begin(), x0.end()), y(y0.begin(), y0.end());
    if (norm(y) < floor) throw FiberCollapse("integrate: |y0| is below the fiber floor");

    GeodesicTrace tr;
    tr.n = n;
    tr.step = T / steps;
    const double h = tr.step;
    tr.t.push_back(0.0);
    tr.x.push_back(x);
    tr.y.push_back(y);
    for (int k = 0; k < steps; ++k) {
        try {
            // ẋ = y, ẏ = −2G(x, y)
            const Vec k1x = y, k1y = accel(S, x, y);
            const Vec x2 = axpy(x, h / 2, k1x), y2 = axpy(y, h / 2, k1y);
            const Vec k2x = y2, k2y = accel(S, x2, y2);
            const Vec x3 = axpy(x, h / 2, k2x), y3 = axpy(y, h / 2, k2y);
            const Vec k3x = y3, k3y = accel(S, x3, y3);
            const Vec x4 = axpy(x, h, k3x), y4 = axpy(y, h, k3y);
            const Vec k4x = y4, k4y = accel(S, x4, y4);
            for (int i = 0; i < n; ++i) {
                x[u(i)] += h / 6 * (k1x[u(i)] + 2 * k2x[u(i)] + 2 * k3x[u(i)] + k4x[u(i)]);
                y[u(i)] += h / 6 * (k1y[u(i)] + 2 * k2y[u(i)] + 2 * k3y[u(i)] + k4y[u(i)]);
            }
        } catch (const EvalError& e) {
            tr.halted = true;
            tr.halt_time = tr.t.back();
            tr.halt_reason = e.what();
            return tr;
        }
        bool finite = true;
        for (int i = 0; i < n; ++i) finite = finite && std::isfinite(x[u(i)]) && std::isfinite(y[u(i)]);
        if (!finite || norm(y) < floor) {
            tr.halted = true;
            tr.halt_time = tr.t.back();
            tr.halt_reason = finite ? "fiber collapse" : "non-finite state";
            return tr;
        }
        tr.t.push_back((k + 1) * h);
        tr.x.push_back(x);
        tr.y.push_back(y);
    }
    return tr;
}

double ode_residual(const Spray& S, const GeodesicTrace& trace)
{
    const std::size_t m = trace.size();
    if (m < 5) throw std::invalid_argument("ode_residual: trace needs at least 5 nodes");
    const double h = trace.step;
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < m; ++k) {
        const Vec g = geodesic_coefficients(S, Point{trace.x[k], trace.y[k]});
        for (int i = 0; i < trace.n; ++i) {
            const std::size_t c = u(i);
            const double ydot =
                (-trace.y[k + 2][c] + 8 * trace.y[k + 1][c] - 8 * trace.y[k - 1][c] + trace.y[k - 2][c]) / (12 * h);
            worst = std::max(worst, std::abs(ydot + 2 * g[c]));
        }
    }
    return worst;
}

ConvergenceOrder convergence_order(const Spray& S, std::span<const double> x0, std::span<const double> y0, double T,
                                   double h0, int halvings)
{
    ConvergenceOrder out;
    double h = h0;
    for (int k = 0; k <= halvings; ++k, h /= 2) {
        const int steps = static_cast<int>(std::lround(T / h));
        const GeodesicTrace tr = integrate(S, x0, y0, T, steps);
        if (tr.halted) throw FiberCollapse("convergence_order: trace halted: " + tr.halt_reason);
        out.steps.push_back(tr.step);
        out.residuals.push_back(ode_residual(S, tr));
    }
    for (std::size_t k = 1; k < out.residuals.size(); ++k)
        out.exponents.push_back(std::log2(out.residuals[k - 1] / out.residuals[k]));
    if (!out.exponents.empty())
        out.order = std::accumulate(out.exponents.begin(), out.exponents.end(), 0.0) / out.exponents.size();
    return out;
}

bool EquivalenceReport::passed() const
{
    return parallel && homogeneous && (!trace_distance || *trace_distance < trace_tolerance);
}

EquivalenceReport projective_factor(const Spray& S1, const Spray& S2, std::span<const Point> samples, double tol)
{
    if (S1.n != S2.n) throw std::invalid_argument("projective_factor: sprays differ in dimension");
    const int n = S1.n;
    std::vector<Point> points{Point{Vec(u(n), 0.0), Vec(u(n), 1.0)}};
    points.insert(points.end(), samples.begin(), samples.end());

    auto factor = [&](const Point& p, Vec* D_out) {
        const Vec g1 = geodesic_coefficients(S1, p), g2 = geodesic_coefficients(S2, p);
        Vec D(u(n));
        double dy = 0.0, yy = 0.0;
        for (int i = 0; i < n; ++i) {
            D[u(i)] = 2 * (g2[u(i)] - g1[u(i)]);
            dy += D[u(i)] * p.y[u(i)];
            yy += p.y[u(i)] * p.y[u(i)];
        }
        double res = 0.0;
        for (int i = 0; i < n; ++i) res += std::pow(D[u(i)] - dy / yy * p.y[u(i)], 2);
        if (D_out) *D_out = D;
        return std::pair{dy / (2 * yy), std::sqrt(res) / std::max(1.0, norm(D))};
    };

    EquivalenceReport r;
    for (const Point& p : points) {
        Vec D;
        const auto [P, res] = factor(p, &D);
        r.samples.push_back({p, P, res});
        r.max_parallel_residual = std::max(r.max_parallel_residual, res);
        if (res >= tol && r.parallel) {
            r.parallel = false;
            r.witness = p;
            r.witness_D = D;
        }
        if (!r.parallel) continue;
        for (const double c : {0.5, 2.0}) {
            Point q = p;
            for (double& v : q.y) v *= c;
            const double Pc = factor(q, nullptr).first;
            const double hres = std::abs(Pc - c * P) / std::max(1.0, std::abs(c * P));
            r.max_homogeneity_residual = std::max(r.max_homogeneity_residual, hres);
            if (hres >= tol) r.homogeneous = false;
        }
    }
    return r;
}

std::vector<double> arclength(const GeodesicTrace& trace)
{
    std::vector<double> s(trace.size(), 0.0);
    for (std::size_t k = 1; k < trace.size(); ++k) {
        double d = 0.0;
        for (int i = 0; i < trace.n; ++i) d += std::pow(trace.x[k][u(i)] - trace.x[k - 1][u(i)], 2);
        s[k] = s[k - 1] + std::sqrt(d);
    }
    return s;
}

double trace_compare(const GeodesicTrace& a, const GeodesicTrace& b)
{
    if (a.n != b.n) throw std::invalid_argument("trace_compare: dimension mismatch");
    if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("trace_compare: empty trace");
    for (int i = 0; i < a.n; ++i)
        if (std::abs(a.x[0][u(i)] - b.x[0][u(i)]) > 1e-12)
            throw std::invalid_argument("trace_compare: traces start at different points");
    const double ya = norm(a.y[0]), yb = norm(b.y[0]);
    double cosine = 0.0;
    for (int i = 0; i < a.n; ++i) cosine += a.y[0][u(i)] * b.y[0][u(i)];
    if (cosine / (ya * yb) < 1.0 - 1e-12)
        throw std::invalid_argument("trace_compare: initial directions differ");

    const std::vector<double> sa = arclength(a), sb = arclength(b);
    if (sa.back() <= 0.0 || sb.back() <= 0.0) throw std::invalid_argument("trace_compare: zero-length trace");
    const double range = std::min(sa.back(), sb.back());
    return std::max(one_sided(sa, a.x, sb, b.x, range), one_sided(sb, b.x, sa, a.x, range));
}

std::string to_csv(const GeodesicTrace& trace)
{
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= trace.n; ++i) os << ",x" << i;
    for (int i = 1; i <= trace.n; ++i) os << ",y" << i;
    os << '\n' << std::setprecision(17);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        os << trace.t[k];
        for (double v : trace.x[k]) os << ',' << v;
        for (double v : trace.y[k]) os << ',' << v;
        os << '\n';
    }
    return os.str();
}

} // namespace spraylab
