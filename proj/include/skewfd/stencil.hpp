#pragma once

#include <functional>
#include <string>
#include <vector>

#include "skewfd/lattice.hpp"
#include "skewfd/rational.hpp"
#include "skewfd/skewtensor.hpp"
#include "skewfd/symmetry.hpp"

namespace skewfd {

/// Component-space weights attached to a spatial arrow pattern. Dense
/// rank-(p+1) array over {0..m-1}^rank; the scalar identity (m=1, value 1)
/// stands in when there is no component structure.
struct CouplingTensor {
    int m = 1;
    int rank = 2;
    std::vector<Rat> entries;  // size m^rank, row-major over the index tuple

    static CouplingTensor scalar(int rank);
    Rat at(const std::vector<int>& alpha) const;
    void set(const std::vector<int>& alpha, const Rat& v);
};

/// One term group of a symmetrized difference: a determinant of argument
/// values taken along p offsets from the evaluation site.
struct Arrow {
    std::vector<IVec> offsets;   // p lattice offsets, slot 0 is the site itself
    std::vector<int> slot_map;   // length rank; T slot k reads the component at
                                 // multi-index position slot_map[k]
    std::vector<int> comp_inv;   // inverse component permutation of the point op
    Rat coef;                    // merged sign * weight
};

struct Scale {
    Rat coef{1};
    int hpow = 0;  // evaluate_scaled divides by h^hpow
};

/// A symmetrized finite difference in arrow form: F(site) = chi(site) *
/// sum over arrows of coef * sum over components of T * det V.
struct Stencil {
    int p = 1;
    int m = 1;
    Lattice lat;  // carries kind and h; extent is irrelevant here
    MultiIndex base;
    std::string group_name;
    SymmetryGroup G;
    CouplingTensor T;
    std::vector<Arrow> arrows;
    Scale scale;
    bool empty_warning = false;  // all arrows cancelled

    /// Number of expanded determinant products: arrows * p!.
    long term_count() const;
};

/// Builds the symmetrized stencil from a base multi-index (l_0 = 0), a
/// signed group and a coupling tensor. Duplicate arrows (same offsets and
/// component labeling) are merged by summing signed weights; arrows with a
/// zero net coefficient are dropped.
Stencil build_stencil(const Lattice& lat, const SymmetryGroup& G, const MultiIndex& base,
                      const CouplingTensor& T, const std::string& group_name = "");

/// Divides all arrow coefficients by their common factor, folding it into
/// the scale. Keeps diagrams minimal.
void reduce_arrows(Stencil& st, bool fold_into_scale = true);

/// Raw grid evaluation (no scale) at one site; m = 1 only for S = Rat/double.
template <class S>
S evaluate(const Stencil& st, const std::vector<std::vector<S>>& args, const Lattice& grid,
           const IVec& site);

/// Raw grid evaluation for m > 1 at (site, alpha0); args[j] indexed by site code.
double evaluate_component(const Stencil& st, const std::vector<std::vector<double>>& args,
                          const Lattice& grid, const IVec& site, int alpha0);

/// Evaluation on smooth functions at a physical point; offsets are placed at
/// x0 + coords(offset) with spacing h. Includes the scale coef / h^hpow.
double evaluate_smooth(const Stencil& st,
                       const std::vector<std::function<double(const DVec&)>>& fns,
                       const DVec& x0, double h, bool apply_scale = true);

/// Materializes the stencil as a skew tensor on a periodic lattice by
/// writing every row and checking row consistency. m = 1 only.
SkewTensor to_tensor(const Stencil& st, const Lattice& grid);

/// Rational linear combination of stencils over the same lattice/group.
Stencil linear_combination(const std::vector<std::pair<Rat, Stencil>>& parts);

/// Deterministic text form of the arrow diagram.
std::string render_diagram(const Stencil& st);

// --- presets ---
Stencil preset_central(double h = 1.0, int stride = 1);       // base (0, stride)
Stencil preset_p2d1(double h = 1.0);                          // base (0, 1, 2)
Stencil preset_fig3b(double h = 1.0);                         // square, translations
Stencil preset_fig3c(double h = 1.0);                         // square, translations + inversion
Stencil arakawa(double h = 1.0);                              // square, full D4
Stencil arakawa_triangular(double h = 1.0);                   // triangular, full D3
Stencil square_p3(double h = 1.0);                            // p = 3, signed translations
Stencil fcc_jacobian3d(double h = 1.0);
Stencil cubic_jacobian3d(double h = 1.0);
Stencil stencil_from_preset(const std::string& name, double h = 1.0);
std::vector<std::string> preset_names();

/// Two-point antisymmetric derivative on an irregular grid given by a
/// strictly monotone map c; data live at c(i h).
struct NonuniformDerivative {
    enum class Variant { midpoint, secant };
    Variant variant;
    std::function<double(double)> c;
    std::function<double(double)> cprime;  // required for midpoint

    /// Approximates dv/dc at c(x0) from samples v(c(x0 + k h)).
    double evaluate(const std::function<double(double)>& v_of_c, double x0, double h) const;
};

NonuniformDerivative nonuniform_derivative(std::function<double(double)> c,
                                           std::function<double(double)> cprime,
                                           NonuniformDerivative::Variant variant);

/// Nonlocal rank-3 skew tensor on an n-ring: the wedge of the central
/// difference with the normalized sum quadrature weights c_i = 1/n.
SkewTensor appendix_tensor(int n, double h = 1.0);

} // namespace skewfd
