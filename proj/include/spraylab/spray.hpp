#pragma once

// Sprays S = y^i ∂/∂x^i − 2G^i ∂/∂y^i and the geometry they induce: the
// nonlinear connection, horizontal and vertical projectors, the Jacobi
// endomorphism Φ and the curvature R.

#include "spraylab/calculus.hpp"
#include "spraylab/expr.hpp"

#include <span>
#include <string>
#include <vector>

namespace spraylab {

using Matrix = std::vector<std::vector<Expression>>;

struct Spray
{
    int n = 0;
    std::vector<Expression> G; // G^1..G^n

    Spray() = default;
    Spray(int dim, std::vector<Expression> coefficients);
    /// Parses each coefficient with the expression DSL.
    static Spray parse(int dim, const std::vector<std::string>& coefficients);

    /// S as a vector field on TM.
    VectorValuedForm vector_field() const;
    /// S(f) = y^k ∂f/∂x^k − 2G^k ∂f/∂y^k.
    Expression apply(const Expression& f) const;
};

/// Homogeneity residuals y^j ∂G^i/∂y^j − 2G^i, one verdict per i.
std::vector<ZeroVerdict> validate(const Spray& S, std::span<const Point> samples, double tol);

struct Connection
{
    int n = 0;
    Matrix N; // N[i][j] = N^i_j = ∂G^i/∂y^j

    /// δf/δx^j = ∂f/∂x^j − N^k_j ∂f/∂y^k  (j is 0-based).
    Expression delta(const Expression& f, int j) const;
    /// Horizontal projector in local form, δ/δx^i ⊗ dx^i.
    VectorValuedForm horizontal_local() const;
};

Connection connection(const Spray& S);

struct Projectors
{
    VectorValuedForm h;
    VectorValuedForm v;
};

/// h = ½(Id − [S,J]), v = ½(Id + [S,J]) through the FN bracket.
Projectors projectors(const Spray& S);

struct JacobiEndomorphism
{
    int n = 0;
    Matrix R; // R[i][j] = R^i_j

    /// R^i_j ∂/∂y^i ⊗ dx^j.
    VectorValuedForm form() const;
};

/// Closed formula R^i_j = 2 δG^i/δx^j − S(N^i_j) + N^i_k N^k_j.
JacobiEndomorphism jacobi(const Spray& S);
/// Cross-check path v∘[S,h].
VectorValuedForm jacobi_via_bracket(const Spray& S);

struct CurvatureTensor
{
    int n = 0;
    std::vector<Matrix> R; // R[i][j][k] = R^i_{jk}, antisymmetric in (j,k)

    /// ½ R^i_{jk} ∂/∂y^i ⊗ dx^j∧dx^k.
    VectorValuedForm form() const;
};

/// R^i_{jk} = δN^i_j/δx^k − δN^i_k/δx^j.
CurvatureTensor curvature(const Spray& S);

enum class SprayClass { flat, isotropic, general };

std::string to_string(SprayClass c);

struct IsotropySample
{
    Point point;
    double lambda = 0.0;
    std::vector<double> eta;
    double residual = 0.0;   // ‖R^i_j − λδ^i_j − y^i η_j‖_max
    double phi_norm = 0.0;   // ‖Φ‖_max
};

struct Classification
{
    SprayClass kind = SprayClass::general;
    bool degenerate = false;           // n = 1
    ZeroVerdict curvature_verdict;
    Expression lambda;                 // tr Φ / (n−1)
    std::vector<Expression> eta;       // (y_i R^i_j − λ y_j)/|y|²
    std::vector<IsotropySample> samples;
    double max_relative_residual = 0.0;
};

/// Flat when R vanishes, isotropic when Φ = λJ + η⊗ℂ holds pointwise to a
/// residual below rel_tol·‖Φ‖_max at every sample, general otherwise.
Classification classify(const Spray& S, std::span<const Point> samples, double rel_tol = 1e-8, double zero_tol = 1e-9);

/// S − 2Pℂ, i.e. G̃^i = G^i + P y^i.  Throws std::invalid_argument unless P
/// is 1-homogeneous in y on the samples.
Spray projective_transform(const Spray& S, const Expression& P, std::span<const Point> samples, double tol = 1e-9);

struct IdentityCheck
{
    std::string name;
    ZeroVerdict verdict;
};

/// Structural identities of a spray, each reduced to a zero test:
/// projector algebra, h against its local form, [J,J], [J,h], [ℂ,h], [ℂ,R],
/// [ℂ,Φ] − Φ, Φ − i_S R, [J,Φ] − 3R, ½[h,h] − R and Φ − v∘[S,h].
std::vector<IdentityCheck> identity_suite(const Spray& S, std::span<const Point> samples, double tol);

/// y^j ∂f/∂y^j − k f.
Expression homogeneity_residual(const Expression& f, int n, int k);

} // namespace spraylab
