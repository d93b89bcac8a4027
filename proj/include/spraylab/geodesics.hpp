#pragma once

// Geodesics of a spray: ẍ^i + 2G^i(x, ẋ) = 0, integrated with fixed-step RK4,
// and projective equivalence S₂ = S₁ − 2Pℂ checked pointwise and along traces.

#include "spraylab/expr.hpp"
#include "spraylab/spray.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spraylab {

inline constexpr double kFiberFloor = 1e-6;

struct GeodesicTrace
{
    int n = 0;
    double step = 0.0;
    std::string method = "rk4";
    std::vector<double> t;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> y;
    bool halted = false;       // stopped before T
    double halt_time = 0.0;
    std::string halt_reason;   // "fiber collapse" or the eval error

    std::size_t size() const { return t.size(); }
};

class FiberCollapse : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws FiberCollapse when |y0| is below the floor.  Later collapse or a
/// domain error halts the trace instead.
GeodesicTrace integrate(const Spray& S, std::span<const double> x0, std::span<const double> y0, double T, int steps,
                        double floor = kFiberFloor);

/// max_k |ẏ_k + 2G(x_k, y_k)| with ẏ from the five-point stencil.
double ode_residual(const Spray& S, const GeodesicTrace& trace);

/// Exponent p with residual ∝ hᵖ, fitted over successive halvings of h0.
struct ConvergenceOrder
{
    std::vector<double> steps;
    std::vector<double> residuals;
    std::vector<double> exponents; // log2 of successive ratios
    double order = 0.0;            // mean exponent
};

ConvergenceOrder convergence_order(const Spray& S, std::span<const double> x0, std::span<const double> y0, double T,
                                   double h0, int halvings = 2);

struct FactorSample
{
    Point point;
    double P = 0.0;
    double parallel_residual = 0.0; // |D − (D·y/|y|²) y|
};

struct EquivalenceReport
{
    bool parallel = true;
    double max_parallel_residual = 0.0;
    std::optional<Point> witness;         // first sample with D not ∥ y
    std::vector<double> witness_D;
    std::vector<FactorSample> samples;
    bool homogeneous = true;
    double max_homogeneity_residual = 0.0;
    std::optional<double> trace_distance;
    double trace_tolerance = 1e-4;

    bool passed() const;
};

/// D = 2(G₂ − G₁) must be ∥ y; then P = D·y/(2|y|²), checked for
/// P(x, cy) = cP(x, y) at c ∈ {0.5, 2}.  The probe x = 0, y = (1,…,1) is
/// evaluated ahead of the given samples.
EquivalenceReport projective_factor(const Spray& S1, const Spray& S2, std::span<const Point> samples,
                                    double tol = 1e-9);

/// Max over the shorter arclength range of |x₁(s) − x₂(s)|.
double trace_compare(const GeodesicTrace& a, const GeodesicTrace& b);

/// Cumulative chord length of the base curve.
std::vector<double> arclength(const GeodesicTrace& trace);

/// Header t,x1..xn,y1..yn.
std::string to_csv(const GeodesicTrace& trace);

} // namespace spraylab
