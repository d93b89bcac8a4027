#pragma once

// Exterior and Frölicher–Nijenhuis calculus on TM\{0} in natural coordinates.
//
// Coordinate slots are numbered 0..2n-1: slot a < n is x^{a+1}, slot a >= n
// is y^{a-n+1}.  A k-form stores its values on strictly increasing slot
// tuples, ω_I = ω(∂_{I_1}, ..., ∂_{I_k}), with the determinant convention
// (dx^1∧dx^2)(∂_1, ∂_2) = 1.  A vector-valued l-form L stores one scalar
// l-form per slot b, the coefficient of ∂_b.

#include "spraylab/expr.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace spraylab {

using MultiIndex = std::vector<int>;

/// Variable carried by a coordinate slot.
Variable slot_variable(int n, int slot);
/// Slot of a variable.
int variable_slot(int n, Variable v);

class ScalarForm
{
public:
    ScalarForm(int n, int degree);

    static ScalarForm function(int n, Expression f);
    /// The coordinate differential dz^slot.
    static ScalarForm coordinate_differential(int n, int slot);

    int dim() const { return n_; }
    int degree() const { return degree_; }

    /// Stored values keyed by strictly increasing slot tuples.  Zero entries
    /// are never stored.
    const std::map<MultiIndex, Expression>& components() const { return comps_; }

    /// Value on an arbitrary slot tuple; repeated slots give 0 and the sign
    /// of the sorting permutation is applied.
    Expression at(const MultiIndex& slots) const;
    /// Sets the value on a slot tuple (sorted internally, sign applied).
    void set(const MultiIndex& slots, const Expression& value);
    void add(const MultiIndex& slots, const Expression& value);

    /// The 0-form value.
    Expression value() const { return at({}); }

    bool empty() const { return comps_.empty(); }
    /// Only dx slots occur.
    bool is_semi_basic() const;

    ScalarForm simplified() const;
    std::map<MultiIndex, double> evaluate(const Point& p) const;

    friend ScalarForm operator+(const ScalarForm& a, const ScalarForm& b);
    friend ScalarForm operator-(const ScalarForm& a, const ScalarForm& b);
    friend ScalarForm operator*(const Expression& f, const ScalarForm& a);

private:
    int n_;
    int degree_;
    std::map<MultiIndex, Expression> comps_;
};

class VectorValuedForm
{
public:
    VectorValuedForm(int n, int degree);

    /// Vector field with the given 2n component functions.
    static VectorValuedForm vector_field(int n, std::span<const Expression> components);

    int dim() const { return n_; }
    int degree() const { return degree_; }

    /// Coefficient form of ∂_slot.
    const ScalarForm& component(int slot) const { return comps_[static_cast<std::size_t>(slot)]; }
    ScalarForm& component(int slot) { return comps_[static_cast<std::size_t>(slot)]; }

    /// L(∂_I) as the coefficient of ∂_slot.
    Expression at(int slot, const MultiIndex& args) const { return component(slot).at(args); }

    bool empty() const;
    /// Values in the fiber directions and arguments on dx slots only.
    bool is_semi_basic() const;
    /// Base-direction coefficients depend on x only, and every argument is a
    /// dx slot.
    bool is_almost_semi_basic() const;

    VectorValuedForm simplified() const;

    friend VectorValuedForm operator+(const VectorValuedForm& a, const VectorValuedForm& b);
    friend VectorValuedForm operator-(const VectorValuedForm& a, const VectorValuedForm& b);
    friend VectorValuedForm operator*(const Expression& f, const VectorValuedForm& a);

private:
    int n_;
    int degree_;
    std::vector<ScalarForm> comps_;
};

// Standard objects.
VectorValuedForm identity_form(int n);
/// Vertical endomorphism J = ∂/∂y^i ⊗ dx^i.
VectorValuedForm vertical_endomorphism(int n);
/// Liouville vector field ℂ = y^i ∂/∂y^i.
VectorValuedForm liouville(int n);

// Operations.  Every result has simplified coefficients with zeros dropped.
ScalarForm exterior_d(const ScalarForm& w);
ScalarForm wedge(const ScalarForm& a, const ScalarForm& b);
/// Shuffle-sum inner product; zero on functions.
ScalarForm inner_product(const VectorValuedForm& L, const ScalarForm& w);
/// Componentwise i_K L.
VectorValuedForm inner_product(const VectorValuedForm& K, const VectorValuedForm& L);
/// d_L = i_L d + (-1)^l d i_L.
ScalarForm lie_type_derivative(const VectorValuedForm& L, const ScalarForm& w);
/// L_X = i_X d + d i_X for a vector field X.
ScalarForm lie_derivative(const VectorValuedForm& X, const ScalarForm& w);
/// [L,K]^b = d_L K^b - (-1)^{kl} d_K L^b.
VectorValuedForm fn_bracket(const VectorValuedForm& L, const VectorValuedForm& K);
/// (L∘K)^b = L^b(∂_c) K^c for a vector-valued 1-form L.
VectorValuedForm compose(const VectorValuedForm& L, const VectorValuedForm& K);
/// (a∧L)^b = a∧L^b.
VectorValuedForm wedge(const ScalarForm& a, const VectorValuedForm& L);

enum class CombinationPattern { alpha_wedge_j, beta_tensor_c, lambda_j_plus_eta_tensor_c };

/// Builds α∧J (first form used), β⊗ℂ (first form used), or λJ + η⊗ℂ with λ
/// the 0-form `first` and η the 1-form `second`.
VectorValuedForm build_combination(const ScalarForm& first, const ScalarForm& second, CombinationPattern pattern);

/// Per-component zero verdicts folded into one.
ZeroVerdict is_zero(const ScalarForm& w, std::span<const Point> samples, double tol);
ZeroVerdict is_zero(const VectorValuedForm& L, std::span<const Point> samples, double tol);

std::string slot_name(int n, int slot);
/// "dx1^dy2" style label of a slot tuple.
std::string index_label(int n, const MultiIndex& slots);

} // namespace spraylab
