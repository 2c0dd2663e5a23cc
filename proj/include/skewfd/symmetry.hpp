#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skewfd/lattice.hpp"

namespace skewfd {

/// Signed map on the index set M = L x {1..m}: an integer linear map plus
/// shift on lattice indices, a permutation of the component slot, and a sign.
/// The sign is the value of the homomorphism G -> Z2 on this element.
struct SignedSymmetry {
    std::vector<IVec> mat;  // d x d integer matrix, row major
    IVec shift;             // length d
    std::vector<int> comp_perm;  // length m, identity when purely spatial
    int sign = 1;

    static SignedSymmetry identity(int d, int m = 1);

    IVec apply_l(const IVec& l) const;
    SiteIndex apply(const SiteIndex& s) const;
    SignedSymmetry compose(const SignedSymmetry& other) const;  // this after other
    bool same_map(const SignedSymmetry& other) const;
};

/// Finite point group together with the (implicit, infinite) translations of
/// the lattice. Translations may carry a parity character
/// chi(t) = (-1)^(sum over flagged dimensions of t_k), which is a sign
/// homomorphism on the translation subgroup.
struct SymmetryGroup {
    int d = 1;
    int m = 1;
    std::vector<SignedSymmetry> point_ops;  // always contains the identity
    bool translations = true;
    IVec translation_parity;  // per-dim 0/1 flags; empty means trivial character

    int translation_sign(const IVec& t) const;
    static SymmetryGroup trivial(int d, int m = 1);
};

/// Closes the generators (plus the identity) under composition.
/// Throws if the closure exceeds max_order or if the same map appears with
/// two different signs (sign not a homomorphism).
SymmetryGroup generate_group(const std::vector<SignedSymmetry>& generators, int d, int m,
                             bool translations, const IVec& translation_parity,
                             int max_order = 256);

using MultiIndex = std::vector<SiteIndex>;

MultiIndex act(const SignedSymmetry& g, const MultiIndex& mi);
MultiIndex act_perm(const std::vector<int>& sigma, const MultiIndex& mi);
int perm_sign(std::vector<int> p);

/// One term of the symmetrized sum: point op g, translation t, canonical
/// permutation sigma with sigma(g(base))_0 = lattice zero.
struct Relocator {
    SignedSymmetry g;   // point part
    IVec translation;   // applied after g
    std::vector<int> sigma;  // one-line notation, maps position -> position
    int sign = 1;       // sgn(sigma) * sgn(g) * chi(translation)
    MultiIndex image;   // sigma(g(base) + translation), image[0].l = 0
    int weight = 1;     // number of lattice zeros in the relocated base
};

/// Enumerates G_i: every (point op, translation) pair carrying some site of
/// the base to the lattice origin, with a canonically chosen sigma
/// (lexicographically minimal image, then lexicographically minimal sigma).
std::vector<Relocator> relocators(const SymmetryGroup& G, const MultiIndex& base);

// --- group presets ---
SymmetryGroup group_translations(int d, int m = 1);
/// Translations with the checkerboard character chi(t) = (-1)^(t_1+...+t_d).
SymmetryGroup group_signed_translations(int d, int m = 1);
SymmetryGroup group_inversion(int d, int sign, int m = 1);  // translations + i -> -i
SymmetryGroup group_d4(int m = 1);      // square point group, sign = det
SymmetryGroup group_d3_tri(int m = 1);  // triangular point group in oblique coords, sign = det
SymmetryGroup group_oh(int m = 1);      // full cubic point group, sign = det
SymmetryGroup group_from_name(const std::string& name, int d, int m = 1);

} // namespace skewfd
