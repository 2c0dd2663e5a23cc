#include "skewfd/symmetry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace skewfd {

SignedSymmetry SignedSymmetry::identity(int d, int m) {
    SignedSymmetry g;
    g.mat.assign(d, IVec(d, 0));
    for (int k = 0; k < d; ++k) g.mat[k][k] = 1;
    g.shift.assign(d, 0);
    g.comp_perm.resize(m);
    std::iota(g.comp_perm.begin(), g.comp_perm.end(), 0);
    g.sign = 1;
    return g;
}

IVec SignedSymmetry::apply_l(const IVec& l) const {
    int d = (int)mat.size();
    IVec out(d, 0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out[i] += mat[i][j] * l[j];
        out[i] += shift[i];
    }
    return out;
}

SiteIndex SignedSymmetry::apply(const SiteIndex& s) const {
    return {apply_l(s.l), comp_perm[s.alpha]};
}

SignedSymmetry SignedSymmetry::compose(const SignedSymmetry& other) const {
    int d = (int)mat.size();
    SignedSymmetry out;
    out.mat.assign(d, IVec(d, 0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) out.mat[i][j] += mat[i][k] * other.mat[k][j];
    out.shift = apply_l(other.shift);
    out.comp_perm.resize(comp_perm.size());
    for (size_t a = 0; a < comp_perm.size(); ++a) out.comp_perm[a] = comp_perm[other.comp_perm[a]];
    out.sign = sign * other.sign;
    return out;
}

bool SignedSymmetry::same_map(const SignedSymmetry& other) const {
    return mat == other.mat && shift == other.shift && comp_perm == other.comp_perm;
}

int SymmetryGroup::translation_sign(const IVec& t) const {
    if (translation_parity.empty()) return 1;
    long s = 0;
    for (int k = 0; k < d; ++k)
        if (translation_parity[k]) s += t[k];
    return (((s % 2) + 2) % 2 == 0) ? 1 : -1;
}

SymmetryGroup SymmetryGroup::trivial(int d, int m) {
    SymmetryGroup G;
    G.d = d;
    G.m = m;
    G.point_ops = {SignedSymmetry::identity(d, m)};
    G.translations = false;
    return G;
}

SymmetryGroup generate_group(const std::vector<SignedSymmetry>& generators, int d, int m,
                             bool translations, const IVec& translation_parity, int max_order) {
    std::vector<SignedSymmetry> elems = {SignedSymmetry::identity(d, m)};
    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t i = 0; i < elems.size(); ++i) {
            for (const auto& g : generators) {
                SignedSymmetry c = g.compose(elems[i]);
                bool found = false;
                for (const auto& e : elems) {
                    if (e.same_map(c)) {
                        if (e.sign != c.sign)
                            throw std::runtime_error("sign is not a homomorphism on the closure");
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    elems.push_back(c);
                    grew = true;
                    if ((int)elems.size() > max_order)
                        throw std::runtime_error("group closure exceeds max_order");
                }
            }
        }
    }
    SymmetryGroup G;
    G.d = d;
    G.m = m;
    G.point_ops = std::move(elems);
    G.translations = translations;
    G.translation_parity = translation_parity;
    return G;
}

MultiIndex act(const SignedSymmetry& g, const MultiIndex& mi) {
    MultiIndex out;
    out.reserve(mi.size());
    for (const auto& s : mi) out.push_back(g.apply(s));
    return out;
}

MultiIndex act_perm(const std::vector<int>& sigma, const MultiIndex& mi) {
    // image_k = mi[sigma^{-1}(k)]
    MultiIndex out(mi.size());
    for (size_t j = 0; j < mi.size(); ++j) out[sigma[j]] = mi[j];
    return out;
}

int perm_sign(std::vector<int> p) {
    int s = 1;
    for (size_t i = 0; i < p.size(); ++i) {
        while (p[i] != (int)i) {
            std::swap(p[i], p[p[i]]);
            s = -s;
        }
    }
    return s;
}

static bool is_zero(const IVec& l) {
    return std::all_of(l.begin(), l.end(), [](int v) { return v == 0; });
}

std::vector<Relocator> relocators(const SymmetryGroup& G, const MultiIndex& base) {
    const int n = (int)base.size();
    if (n == 0) throw std::invalid_argument("empty base");
    if (!is_zero(base[0].l)) throw std::invalid_argument("base must have l_0 = 0");

    std::vector<Relocator> out;
    std::set<std::tuple<std::vector<IVec>, std::vector<int>, IVec>> seen;  // (matrix, comp_perm, translation)
    for (const auto& g : G.point_ops) {
        MultiIndex gl = act(g, base);
        std::set<IVec> carriers;
        if (G.translations) {
            for (const auto& s : gl) carriers.insert(s.l);
        } else {
            carriers.insert(IVec(G.d, 0));  // only the null translation
        }
        for (const auto& c : carriers) {
            IVec t(G.d);
            for (int k = 0; k < G.d; ++k) t[k] = -c[k];
            MultiIndex rel(n);
            for (int j = 0; j < n; ++j) {
                IVec l(G.d);
                for (int k = 0; k < G.d; ++k) l[k] = gl[j].l[k] + t[k];
                rel[j] = {l, gl[j].alpha};
            }
            bool has_zero = false;
            int weight = 0;
            for (const auto& s : rel)
                if (is_zero(s.l)) {
                    has_zero = true;
                    ++weight;
                }
            if (!has_zero) continue;
            if (!seen.insert({g.mat, g.comp_perm, t}).second) continue;

            // canonical sigma: minimal lattice image with image[0] = 0,
            // tie-break by minimal one-line sigma
            std::vector<int> sigma(n);
            std::iota(sigma.begin(), sigma.end(), 0);
            std::vector<int> best_sigma;
            std::vector<IVec> best_img;
            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            do {
                // treat perm as sigma: image_k = rel[sigma^{-1}(k)]
                std::vector<IVec> img(n);
                bool ok = true;
                for (int j = 0; j < n; ++j) img[perm[j]] = rel[j].l;
                if (!is_zero(img[0])) ok = false;
                if (ok && (best_sigma.empty() || img < best_img ||
                           (img == best_img && perm < best_sigma))) {
                    best_img = img;
                    best_sigma = perm;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));

            Relocator r;
            r.g = g;
            r.translation = t;
            r.sigma = best_sigma;
            r.sign = perm_sign(best_sigma) * g.sign * G.translation_sign(t);
            r.image = act_perm(best_sigma, rel);
            r.weight = weight;
            out.push_back(std::move(r));
        }
    }
    return out;
}

// --- presets ---

SymmetryGroup group_translations(int d, int m) {
    SymmetryGroup G;
    G.d = d;
    G.m = m;
    G.point_ops = {SignedSymmetry::identity(d, m)};
    G.translations = true;
    return G;
}

SymmetryGroup group_signed_translations(int d, int m) {
    SymmetryGroup G = group_translations(d, m);
    G.translation_parity.assign(d, 1);
    return G;
}

SymmetryGroup group_inversion(int d, int sign, int m) {
    SignedSymmetry inv = SignedSymmetry::identity(d, m);
    for (int k = 0; k < d; ++k) inv.mat[k][k] = -1;
    inv.sign = sign;
    return generate_group({inv}, d, m, true, {});
}

static SignedSymmetry linear2(int a, int b, int c, int dd, int sign, int m) {
    SignedSymmetry g = SignedSymmetry::identity(2, m);
    g.mat = {{a, b}, {c, dd}};
    g.sign = sign;
    return g;
}

SymmetryGroup group_d4(int m) {
    // quarter rotation (det +1) and axis reflection (det -1)
    auto rot = linear2(0, -1, 1, 0, 1, m);
    auto refl = linear2(1, 0, 0, -1, -1, m);
    return generate_group({rot, refl}, 2, m, true, {});
}

SymmetryGroup group_d3_tri(int m) {
    // 2pi/3 rotation and a mirror of the triangular lattice, oblique coordinates
    auto rot = linear2(-1, -1, 1, 0, 1, m);
    auto refl = linear2(1, 1, 0, -1, -1, m);
    return generate_group({rot, refl}, 2, m, true, {});
}

SymmetryGroup group_oh(int m) {
    // all signed permutation matrices, sign = det
    std::vector<SignedSymmetry> gens;
    SignedSymmetry swap01 = SignedSymmetry::identity(3, m);
    swap01.mat = {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}};
    swap01.sign = -1;
    SignedSymmetry cyc = SignedSymmetry::identity(3, m);
    cyc.mat = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    SignedSymmetry flipz = SignedSymmetry::identity(3, m);
    flipz.mat = {{1, 0, 0}, {0, 1, 0}, {0, 0, -1}};
    flipz.sign = -1;
    return generate_group({swap01, cyc, flipz}, 3, m, true, {});
}

SymmetryGroup group_from_name(const std::string& name, int d, int m) {
    if (name == "translations") return group_translations(d, m);
    if (name == "signed_translations") return group_signed_translations(d, m);
    if (name == "inversion" || name == "inversion+") return group_inversion(d, 1, m);
    if (name == "inversion-") return group_inversion(d, -1, m);
    if (name == "d4") return group_d4(m);
    if (name == "d3") return group_d3_tri(m);
    if (name == "oh") return group_oh(m);
    throw std::invalid_argument("unknown group preset: " + name);
}

} // namespace skewfd
