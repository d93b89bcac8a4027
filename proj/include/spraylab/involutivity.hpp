#pragma once

// Symbols of the first-order operator P₁θ = (L_ℂθ, d_Jθ, d_hθ) at a point u,
// their kernels g¹_u and g²_u, and the Cartan test with a quasi-regular basis.
//
// A first-order symbol A is a bilinear map (X, ∂x_m) ↦ A(X, ∂x_m), with X in
// T_u(TM) and the second slot semi-basic.  A is parametrized by its values
// α_{a m} = A(b_a, ∂x_m) on a frame {b_a} of T_u(TM).  Second-order symbols B
// are symmetric in the first two slots: β_{ab m} = B(b_a, b_b, ∂x_m), a ≤ b.

#include "spraylab/expr.hpp"
#include "spraylab/linalg.hpp"
#include "spraylab/spray.hpp"

#include <vector>

namespace spraylab {

/// 2n×2n matrix whose columns are frame vectors in natural coordinates.
using Frame = DenseMatrix;

/// Adapted frame {δ/δx^1..δ/δx^n, ∂/∂y^1..∂/∂y^n} at u.
Frame adapted_frame(const Spray& S, const Point& u);

struct SymbolMatrix
{
    DenseMatrix matrix;   // rows: codomain components; columns: frame parameters
    Point point;
    int domain_dim = 0;
    int codomain_dim = 0;
};

SymbolMatrix sigma1_matrix(const Spray& S, const Point& u);
SymbolMatrix sigma1_matrix(const Spray& S, const Point& u, const Frame& frame);
SymbolMatrix sigma2_matrix(const Spray& S, const Point& u);
SymbolMatrix sigma2_matrix(const Spray& S, const Point& u, const Frame& frame);

/// Frame column index of α_{a m}.
int sigma1_column(int n, int a, int m);

struct CartanBasisResult
{
    std::vector<int> dims;   // dim g¹_{e_1..e_j}, j = 1..n
    int sum = 0;
    bool equality = false;   // dim g² == dim g¹ + sum
};

struct DimensionReport
{
    int n = 0;
    Point point;
    int dim_g1 = 0;
    int dim_g2 = 0;
    int expected_g1 = 0;           // n²
    int expected_g2 = 0;           // n²(n+1)/2
    std::vector<int> expected_dims; // n(n−j)
    CartanBasisResult quasi_regular; // e_1 = h_1, e_j = h_j + v_{j−1}, e_n = S + v_{n−1}
    CartanBasisResult unshifted;     // e_j = h_j, e_n = S
    bool indeterminate = false;      // some σ/σ_max fell in [1e-12, 1e-6]
    double min_retained_ratio = 1.0; // over all rank computations
    double max_discarded_ratio = 0.0;

    /// Cartan equality with the quasi-regular basis and no ill-conditioning.
    bool verdict() const { return quasi_regular.equality && !indeterminate; }
    bool matches_expected() const;
};

DimensionReport cartan_test(const Spray& S, const Point& u);

/// Warn above this dimension; the σ² domain grows as 2n³ + n².
inline constexpr int kInvolutivityDimensionCap = 6;

} // namespace spraylab
