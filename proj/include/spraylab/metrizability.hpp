#pragma once

// Projective metrizability of a spray by a candidate semi-basic 1-form θ:
// algebraic conditions rank dθ = 2n−2 and i_Sθ > 0, differential conditions
// L_ℂθ = 0, d_Jθ = 0, d_hθ = 0, and the curvature obstruction d_Rθ = 0.

#include "spraylab/calculus.hpp"
#include "spraylab/spray.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spraylab {

struct SemiBasicOneForm
{
    int n = 0;
    std::vector<Expression> theta; // θ_1..θ_n

    SemiBasicOneForm() = default;
    SemiBasicOneForm(int dim, std::vector<Expression> components);

    ScalarForm form() const;
    /// i_Sθ = θ_i y^i.
    Expression contract_liouville() const;
};

/// θ = d_JF, θ_i = ∂F/∂y^i.  Throws std::invalid_argument when F is not
/// 1-homogeneous in y on the samples.
SemiBasicOneForm euler_poincare(const Expression& F, int n, std::span<const Point> samples, double tol = 1e-9);

struct ClosedFormOperators
{
    ScalarForm lc;  // L_ℂθ
    ScalarForm dj;  // d_Jθ
    ScalarForm dh;  // d_hθ
};

/// Coordinate formulas:
///   (L_ℂθ)_i = y^j ∂θ_i/∂y^j
///   (d_Jθ)(∂x_a, ∂x_b) = ∂θ_b/∂y^a − ∂θ_a/∂y^b
///   (d_hθ)(∂x_a, ∂x_b) = δθ_b/δx^a − δθ_a/δx^b
ClosedFormOperators closed_form_operators(const Spray& S, const SemiBasicOneForm& theta);

struct AngularMetric
{
    int n = 0;
    Matrix h;                // h_ij = F ∂θ_i/∂y^j
    Expression F;            // i_Sθ
    std::vector<int> ranks;  // per evaluated sample
    int skipped = 0;
};

/// Angular metric of θ with F = i_Sθ, ranked per sample (σ > 1e-9·σ_max).
AngularMetric angular_metric(const SemiBasicOneForm& theta, std::span<const Point> samples);

enum class Status { pass, fail, inconclusive };
std::string to_string(Status s);

struct ConditionVerdict
{
    std::string name;
    Status status = Status::pass;
    std::optional<ZeroVerdict> zero; // zero-type conditions
    double min_value = 0.0;          // positivity: min i_Sθ over samples
    std::vector<int> ranks;          // rank: per-sample rank of dθ
    std::optional<Point> witness;
    std::string detail;
};

struct Obstruction
{
    ScalarForm d_r_theta{1, 0};           // generic d_Rθ
    std::vector<MultiIndex> bianchi_index;
    std::vector<Expression> bianchi;      // h_ik R^k_jl + h_lk R^k_ij + h_jk R^k_li, i<j<l
    ZeroVerdict generic;
    ZeroVerdict cyclic;
    bool agree() const { return generic.is_zero() == cyclic.is_zero(); }
};

Obstruction obstruction(const Spray& S, const SemiBasicOneForm& theta, std::span<const Point> samples, double tol);

struct ConditionReport
{
    // Order: L_C theta, d_J theta, d_h theta, positivity, rank, obstruction.
    std::vector<ConditionVerdict> verdicts;
    Obstruction obstruction_detail;
    AngularMetric angular;
    /// Per sample: rank(dθ) = 2n−2 exactly when rank(h) = n−1.
    bool rank_equivalence = true;

    bool passed() const;
    const ConditionVerdict& verdict(const std::string& name) const;
};

ConditionReport check_conditions(const Spray& S, const SemiBasicOneForm& theta, std::span<const Point> samples,
                                 double tol = 1e-9);

class MetrizabilityError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct RecoveredFinsler
{
    Expression F;        // i_Sθ
    Expression P;        // S(F)/(2F), so that S_F = S − 2Pℂ
    /// −P: the factor with S = S_F − 2·deformation·ℂ.
    Expression deformation;
    Spray S_F;
    ZeroVerdict p_homogeneity;  // y^j ∂P/∂y^j − P
    ZeroVerdict geodesic;       // S_F(F)
};

/// Throws MetrizabilityError when the conditions do not all pass.
RecoveredFinsler recover_finsler(const Spray& S, const SemiBasicOneForm& theta, std::span<const Point> samples,
                                 double tol = 1e-9);

/// Positivity margin for i_Sθ.
inline constexpr double kPositivityMargin = 1e-8;

} // namespace spraylab
