#pragma once

#include <functional>
#include <string>
#include <vector>

#include "skewfd/stencil.hpp"

namespace skewfd {

/// Element of Q[sqrt(3)]; closes the exact arithmetic over triangular-lattice
/// coordinates as well as the rational ones.
struct Quad {
    Rat a{0}, b{0};  // a + b*sqrt(3)

    Quad() = default;
    Quad(Rat a_) : a(a_) {}
    Quad(Rat a_, Rat b_) : a(a_), b(b_) {}

    bool is_zero() const { return a == Rat(0) && b == Rat(0); }
    double to_d() const { return to_double(a) + to_double(b) * 1.7320508075688772; }

    friend Quad operator+(const Quad& x, const Quad& y) { return {x.a + y.a, x.b + y.b}; }
    friend Quad operator-(const Quad& x, const Quad& y) { return {x.a - y.a, x.b - y.b}; }
    friend Quad operator*(const Quad& x, const Quad& y) {
        return {x.a * y.a + Rat(3) * x.b * y.b, x.a * y.b + x.b * y.a};
    }
    friend bool operator==(const Quad& x, const Quad& y) { return x.a == y.a && x.b == y.b; }
    Quad inverse() const;
};

/// Linear constant-coefficient differential operator on p arguments:
/// sum of coef * prod_j (d^orders[j] v^j), evaluated at a point.
struct DerivTerm {
    Rat coef;
    std::vector<IVec> orders;  // one multi-order per argument
};

struct DerivOperator {
    std::string name;
    int d = 1;
    int p = 1;
    std::vector<DerivTerm> terms;
};

// --- common operators ---
DerivOperator op_dx(int d = 1, Rat coef = Rat(1));                  // coef * v'
DerivOperator op_dxxx(Rat coef = Rat(1));                           // coef * v'''
DerivOperator op_jacobian2d(Rat coef = Rat(1));                     // coef * (vx wy - vy wx)
DerivOperator op_pair_vpww();                                       // v'w'' - w'v''
DerivOperator op_pair_vwww();                                       // v w''' - w v'''
DerivOperator op_cyclic_jacobian3(Rat coef = Rat(1));               // v1 J(v2,v3) + cyclic
DerivOperator op_det_grad3(Rat coef = Rat(1));                      // det(dv^i/dx_j), 3D

/// Smooth test function together with its analytic partial derivatives.
struct SmoothFn {
    std::function<double(const DVec& x, const IVec& order)> deriv;
    double operator()(const DVec& x) const { return deriv(x, IVec(x.size(), 0)); }
};

/// Deterministic mixed sine/polynomial test tuples.
std::vector<std::vector<SmoothFn>> test_tuples(int d, int p, int count, unsigned seed);

double apply_operator(const DerivOperator& op, const std::vector<SmoothFn>& fns, const DVec& x);

struct RefinementStudy {
    std::vector<double> hs;
    std::vector<double> errors;
    double slope = 0;
    double residual = 0;  // rms log10 deviation from the fitted line
    bool consistent = false;
};

/// Least-squares slope of log(error) vs log(h).
RefinementStudy fit_slope(const std::vector<double>& hs, const std::vector<double>& errors,
                          double residual_tol);

/// Refinement study of a raw stencil against a target operator; the stencil
/// value is divided by h^scale_power before comparison.
RefinementStudy order_estimate(const Stencil& st, const DerivOperator& target,
                               const std::vector<std::vector<SmoothFn>>& tests, int scale_power,
                               int levels = 5, double h0 = 0.2, double residual_tol = 1e-3);

struct LeadingFit {
    int hpower = 0;                // leading power of the raw stencil
    std::vector<double> coeffs;    // per basis operator
    bool exact = false;            // rational system solved with zero residual
    double float_agreement = 0;    // max |oracle - floating least squares|
};

/// Identifies the leading term of a raw stencil in a basis of differential
/// operators. The primary computation is exact: the stencil is evaluated on
/// monomial tuples over Q[sqrt(3)] and the resulting linear system is solved
/// in that field; a floating least-squares fit cross-checks the result.
LeadingFit fit_leading_operator(const Stencil& st, const std::vector<DerivOperator>& basis,
                                int max_degree = 5);

/// max over slots j of |sum_i F_i grad^j_i|.
Rat conservation_residual(const SkewTensor& K, const std::vector<std::vector<Rat>>& grads);
double conservation_residual(const SkewTensor& K, const std::vector<std::vector<double>>& grads);

} // namespace skewfd
