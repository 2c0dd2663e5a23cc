#include "skewfd/stencil.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace skewfd {

static long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

CouplingTensor CouplingTensor::scalar(int rank) {
    CouplingTensor T;
    T.m = 1;
    T.rank = rank;
    T.entries.assign(1, Rat(1));
    return T;
}

static long flat_index(const std::vector<int>& alpha, int m) {
    long f = 0;
    for (int a : alpha) {
        if (a < 0 || a >= m) throw std::out_of_range("component index out of range");
        f = f * m + a;
    }
    return f;
}

Rat CouplingTensor::at(const std::vector<int>& alpha) const {
    if ((int)alpha.size() != rank) throw std::invalid_argument("coupling index rank mismatch");
    return entries[flat_index(alpha, m)];
}

void CouplingTensor::set(const std::vector<int>& alpha, const Rat& v) {
    if ((int)alpha.size() != rank) throw std::invalid_argument("coupling index rank mismatch");
    entries[flat_index(alpha, m)] = v;
}

long Stencil::term_count() const {
    long f = 1;
    for (int k = 2; k <= p; ++k) f *= k;
    return (long)arrows.size() * f;
}

// checks that T is skew under transpositions inside each block of equal base offsets
static bool coupling_ok(const CouplingTensor& T, const MultiIndex& base) {
    const int n = (int)base.size();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (base[a].l != base[b].l) continue;
            std::vector<int> alpha(n, 0);
            bool bad = false;
            while (true) {
                std::vector<int> sw = alpha;
                std::swap(sw[a], sw[b]);
                if (T.at(alpha) != -T.at(sw)) {
                    bad = true;
                    break;
                }
                int k = n - 1;
                while (k >= 0 && ++alpha[k] == T.m) alpha[k--] = 0;
                if (k < 0) break;
            }
            if (bad) return false;
        }
    return true;
}

Stencil build_stencil(const Lattice& lat, const SymmetryGroup& G, const MultiIndex& base,
                      const CouplingTensor& T, const std::string& group_name) {
    const int rank = (int)base.size();
    if (rank < 2) throw std::invalid_argument("base needs at least two sites");
    if ((int)T.rank != rank) throw std::invalid_argument("coupling rank must match base size");
    Stencil st;
    st.p = rank - 1;
    st.m = T.m;
    st.lat = lat;
    st.base = base;
    st.group_name = group_name;
    st.G = G;
    st.T = T;
    st.scale = {Rat(1), 0};

    // a purely spatial group may have been generated with m = 1; widen its
    // component permutations to match the coupling tensor
    if (st.G.m != T.m) {
        std::vector<int> id(T.m);
        std::iota(id.begin(), id.end(), 0);
        for (auto& g : st.G.point_ops) {
            for (size_t a = 0; a < g.comp_perm.size(); ++a)
                if (g.comp_perm[a] != (int)a)
                    throw std::invalid_argument("group and coupling disagree on m");
            g.comp_perm = id;
        }
        st.G.m = T.m;
    }

    if (!coupling_ok(T, base)) {
        if (T.m == 1) {
            // repeated sites with a scalar coupling: everything cancels
            st.empty_warning = true;
            return st;
        }
        throw std::invalid_argument("coupling tensor not skew under equal-offset block");
    }

    struct KeyT {
        std::vector<IVec> offsets;
        std::vector<int> slot_map;
        std::vector<int> comp_inv;
        bool operator<(const KeyT& o) const {
            return std::tie(offsets, slot_map, comp_inv) <
                   std::tie(o.offsets, o.slot_map, o.comp_inv);
        }
    };
    std::map<KeyT, Rat> merged;
    for (const auto& r : relocators(st.G, base)) {
        KeyT k;
        for (int j = 1; j < rank; ++j) k.offsets.push_back(r.image[j].l);
        if (T.m == 1) {
            k.slot_map.resize(rank);
            std::iota(k.slot_map.begin(), k.slot_map.end(), 0);
            k.comp_inv = {0};
        } else {
            k.slot_map = r.sigma;
            k.comp_inv.resize(T.m);
            for (int a = 0; a < T.m; ++a) k.comp_inv[r.g.comp_perm[a]] = a;
        }
        merged[k] += Rat(r.sign) * Rat(r.weight);
    }
    for (auto& [k, v] : merged) {
        if (v == Rat(0)) continue;
        st.arrows.push_back({k.offsets, k.slot_map, k.comp_inv, v});
    }
    if (st.arrows.empty()) st.empty_warning = true;
    return st;
}

void reduce_arrows(Stencil& st, bool fold_into_scale) {
    long long g = 0;
    for (const auto& a : st.arrows) {
        if (a.coef.denominator() != 1) return;  // only reduce integer stencils
        g = std::gcd(g, std::abs((long long)a.coef.numerator()));
    }
    if (g <= 1) return;
    for (auto& a : st.arrows) a.coef /= Rat(g);
    if (fold_into_scale) st.scale.coef *= Rat(g);
}

template <class S>
static S det_small(std::vector<std::vector<S>> a) {
    const int n = (int)a.size();
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    S acc(0);
    for (int j = 0; j < n; ++j) {
        std::vector<std::vector<S>> sub(n - 1, std::vector<S>(n - 1));
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c)
                if (c != j) sub[r - 1][cc++] = a[r][c];
        }
        S term = a[0][j] * det_small(sub);
        if (j % 2 == 0) acc += term;
        else acc -= term;
    }
    return acc;
}

template <class S>
S evaluate(const Stencil& st, const std::vector<std::vector<S>>& args, const Lattice& grid,
           const IVec& site) {
    if (st.m != 1) throw std::invalid_argument("grid evaluate requires m = 1");
    if ((int)args.size() != st.p) throw std::invalid_argument("argument count must be p");
    S acc(0);
    for (const auto& a : st.arrows) {
        std::vector<std::vector<S>> V(st.p, std::vector<S>(st.p));
        for (int k = 0; k < st.p; ++k) {
            IVec l(grid.d);
            for (int q = 0; q < grid.d; ++q) l[q] = site[q] + a.offsets[k][q];
            long code = grid.site_code(l, 0, 1);
            for (int j = 0; j < st.p; ++j) V[j][k] = args[j][code];
        }
        S term = det_small(V);
        if constexpr (std::is_same_v<S, double>) {
            term *= to_double(a.coef);
        } else {
            term *= a.coef;
        }
        acc += term;
    }
    int chi = st.G.translation_sign(site);
    return chi > 0 ? acc : S(0) - acc;
}

template double evaluate<double>(const Stencil&, const std::vector<std::vector<double>>&,
                                 const Lattice&, const IVec&);
template Rat evaluate<Rat>(const Stencil&, const std::vector<std::vector<Rat>>&, const Lattice&,
                           const IVec&);

double evaluate_component(const Stencil& st, const std::vector<std::vector<double>>& args,
                          const Lattice& grid, const IVec& site, int alpha0) {
    if ((int)args.size() != st.p) throw std::invalid_argument("argument count must be p");
    const int rank = st.p + 1;
    double acc = 0;
    for (const auto& a : st.arrows) {
        std::vector<long> flats(st.p);
        for (int k = 0; k < st.p; ++k) {
            IVec l(grid.d);
            for (int q = 0; q < grid.d; ++q) l[q] = site[q] + a.offsets[k][q];
            flats[k] = grid.site_code(l, 0, st.m);  // code of component 0 at this site
        }
        // sum over the argument components alpha_1..alpha_p
        std::vector<int> alpha(rank, 0);
        alpha[0] = alpha0;
        while (true) {
            std::vector<int> beta(rank);
            for (int k = 0; k < rank; ++k) beta[k] = a.comp_inv[alpha[a.slot_map[k]]];
            Rat t = st.T.at(beta);
            if (t != Rat(0)) {
                std::vector<std::vector<double>> V(st.p, std::vector<double>(st.p));
                for (int k = 0; k < st.p; ++k)
                    for (int j = 0; j < st.p; ++j) V[j][k] = args[j][flats[k] + alpha[k + 1]];
                acc += to_double(a.coef) * to_double(t) * det_small(V);
            }
            int k = rank - 1;
            while (k >= 1 && ++alpha[k] == st.m) alpha[k--] = 0;
            if (k < 1) break;
        }
    }
    return st.G.translation_sign(site) > 0 ? acc : -acc;
}

double evaluate_smooth(const Stencil& st,
                       const std::vector<std::function<double(const DVec&)>>& fns,
                       const DVec& x0, double h, bool apply_scale) {
    if (st.m != 1) throw std::invalid_argument("smooth evaluate requires m = 1");
    if ((int)fns.size() != st.p) throw std::invalid_argument("argument count must be p");
    Lattice unit = st.lat;
    unit.h = 1.0;
    double acc = 0;
    for (const auto& a : st.arrows) {
        std::vector<std::vector<double>> V(st.p, std::vector<double>(st.p));
        for (int k = 0; k < st.p; ++k) {
            DVec xc = unit.coords(a.offsets[k]);
            DVec x(x0.size());
            for (size_t q = 0; q < x0.size(); ++q) x[q] = x0[q] + h * xc[q];
            for (int j = 0; j < st.p; ++j) V[j][k] = fns[j](x);
        }
        acc += to_double(a.coef) * det_small(V);
    }
    if (apply_scale) acc *= to_double(st.scale.coef) / std::pow(h, st.scale.hpow);
    return acc;
}

SkewTensor to_tensor(const Stencil& st, const Lattice& grid) {
    if (st.m != 1) throw std::invalid_argument("to_tensor requires m = 1");
    bool parity = !st.G.translation_parity.empty() &&
                  std::any_of(st.G.translation_parity.begin(), st.G.translation_parity.end(),
                              [](int v) { return v != 0; });
    if (parity)
        for (int k = 0; k < grid.d; ++k)
            if (st.G.translation_parity[k] && grid.extent[k] % 2 != 0)
                throw std::invalid_argument("signed translations need even extents");

    SkewTensor out;
    out.rank = st.p + 1;
    out.lat = grid;
    out.m = 1;
    for (const auto& site : grid.all_sites()) {
        int chi = st.G.translation_sign(site);
        for (const auto& a : st.arrows) {
            Key key;
            key.push_back(grid.site_code(site, 0, 1));
            std::set<long> uniq = {key[0]};
            for (const auto& off : a.offsets) {
                IVec l(grid.d);
                for (int q = 0; q < grid.d; ++q) l[q] = site[q] + off[q];
                long code = grid.site_code(l, 0, 1);
                if (!uniq.insert(code).second)
                    throw std::invalid_argument("lattice too small: stencil wraps onto itself");
                key.push_back(code);
            }
            Rat v = chi > 0 ? a.coef : -a.coef;
            Rat existing = out.at(key);
            if (existing == Rat(0)) {
                out.add(key, v);
            } else if (existing != v) {
                throw std::logic_error("inconsistent stencil rows; arrow set not group-closed");
            }
        }
    }
    return out;
}

Stencil linear_combination(const std::vector<std::pair<Rat, Stencil>>& parts) {
    if (parts.empty()) throw std::invalid_argument("empty combination");
    Stencil out = parts[0].second;
    out.arrows.clear();
    out.scale = {Rat(1), 0};
    out.group_name = "combination";
    std::map<std::vector<IVec>, Rat> merged;
    for (const auto& [c, st] : parts) {
        if (st.p != out.p || st.m != 1 || out.m != 1)
            throw std::invalid_argument("combination requires matching p and m = 1");
        for (const auto& a : st.arrows) merged[a.offsets] += c * a.coef;
    }
    std::vector<int> id_map(out.p + 1);
    std::iota(id_map.begin(), id_map.end(), 0);
    for (const auto& [offs, v] : merged)
        if (v != Rat(0)) out.arrows.push_back({offs, id_map, {0}, v});
    if (out.arrows.empty()) out.empty_warning = true;
    return out;
}

static std::string offset_str(const IVec& o) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < o.size(); ++i) os << (i ? "," : "") << o[i];
    os << ")";
    return os.str();
}

std::string render_diagram(const Stencil& st) {
    std::ostringstream os;
    os << "p=" << st.p << " m=" << st.m << " group=" << st.group_name
       << " arrows=" << st.arrows.size();
    if (st.empty_warning) os << "  [empty: all arrows cancelled]";
    os << "\n";
    auto arrows = st.arrows;
    std::sort(arrows.begin(), arrows.end(),
              [](const Arrow& a, const Arrow& b) { return a.offsets < b.offsets; });
    for (const auto& a : arrows) {
        os << (a.coef > Rat(0) ? "(+" : "(-") << to_string(a.coef > Rat(0) ? a.coef : -a.coef)
           << ") ";
        for (size_t k = 0; k < a.offsets.size(); ++k)
            os << (k ? " -> " : "") << offset_str(a.offsets[k]);
        if (st.m > 1) {
            os << "  {";
            for (int k = 0; k < st.p + 1; ++k) os << (char)('a' + a.slot_map[k]);
            os << "}";
        }
        os << "\n";
    }
    return os.str();
}

// --- presets ---

static MultiIndex mi1(std::initializer_list<int> ls) {
    MultiIndex mi;
    for (int l : ls) mi.push_back({{l}, 0});
    return mi;
}

static MultiIndex mi2(std::initializer_list<std::pair<int, int>> ls) {
    MultiIndex mi;
    for (auto [a, b] : ls) mi.push_back({{a, b}, 0});
    return mi;
}

static MultiIndex mi3(std::initializer_list<std::array<int, 3>> ls) {
    MultiIndex mi;
    for (auto v : ls) mi.push_back({{v[0], v[1], v[2]}, 0});
    return mi;
}

Stencil preset_central(double h, int stride) {
    auto st = build_stencil(Lattice::line1d(8, h), group_translations(1), mi1({0, stride}),
                            CouplingTensor::scalar(2), "translations");
    st.scale = {Rat(1, 2), 1};
    return st;
}

Stencil preset_p2d1(double h) {
    return build_stencil(Lattice::line1d(8, h), group_translations(1), mi1({0, 1, 2}),
                         CouplingTensor::scalar(3), "translations");
}

Stencil preset_fig3b(double h) {
    return build_stencil(Lattice::square2d(8, h), group_translations(2),
                         mi2({{0, 0}, {1, 0}, {0, 1}}), CouplingTensor::scalar(3), "translations");
}

Stencil preset_fig3c(double h) {
    return build_stencil(Lattice::square2d(8, h), group_inversion(2, 1),
                         mi2({{0, 0}, {1, 0}, {0, 1}}), CouplingTensor::scalar(3), "inversion");
}

Stencil arakawa(double h) {
    auto st = build_stencil(Lattice::square2d(8, h), group_d4(), mi2({{0, 0}, {1, 0}, {0, 1}}),
                            CouplingTensor::scalar(3), "d4");
    reduce_arrows(st, false);  // coefficients +-2 -> +-1
    st.scale = {Rat(1, 12), 2};
    return st;
}

Stencil arakawa_triangular(double h) {
    auto st = build_stencil(Lattice::triangular2d(8, h), group_d3_tri(),
                            mi2({{0, 0}, {1, 0}, {0, 1}}), CouplingTensor::scalar(3), "d3");
    reduce_arrows(st, true);  // coefficients +-3, folded into the scale
    return st;
}

Stencil square_p3(double h) {
    return build_stencil(Lattice::square2d(8, h), group_signed_translations(2),
                         mi2({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), CouplingTensor::scalar(4),
                         "signed_translations");
}

Stencil fcc_jacobian3d(double h) {
    auto st = build_stencil(Lattice::fcc3d(8, h), group_oh(),
                            mi3({{{0, 0, 0}}, {{0, 1, 1}}, {{1, 0, 1}}, {{1, 1, 0}}}),
                            CouplingTensor::scalar(4), "oh");
    reduce_arrows(st, false);  // coefficients +-24 -> +-1
    st.scale = {Rat(1, 16), 3};
    return st;
}

Stencil cubic_jacobian3d(double h) {
    auto st = build_stencil(Lattice::cubic3d(8, h), group_oh(),
                            mi3({{{0, 0, 0}}, {{0, 0, 1}}, {{0, 1, 0}}, {{1, 0, 0}}}),
                            CouplingTensor::scalar(4), "oh");
    reduce_arrows(st, true);  // coefficients +-6, folded into the scale
    return st;
}

Stencil stencil_from_preset(const std::string& name, double h) {
    if (name == "central") return preset_central(h);
    if (name == "p2d1") return preset_p2d1(h);
    if (name == "jacobian2d") return preset_fig3b(h);
    if (name == "jacobian2d_half") return preset_fig3c(h);
    if (name == "arakawa") return arakawa(h);
    if (name == "arakawa_triangular") return arakawa_triangular(h);
    if (name == "square_p3") return square_p3(h);
    if (name == "fcc_jacobian3d") return fcc_jacobian3d(h);
    if (name == "cubic_jacobian3d") return cubic_jacobian3d(h);
    throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"central",  "p2d1",      "jacobian2d", "jacobian2d_half", "arakawa",
            "arakawa_triangular", "square_p3", "fcc_jacobian3d", "cubic_jacobian3d"};
}

double NonuniformDerivative::evaluate(const std::function<double(double)>& v_of_c, double x0,
                                      double h) const {
    auto v = [&](double x) { return v_of_c(c(x)); };
    if (variant == Variant::midpoint) {
        double qp = 1.0 / (cprime(x0 + 0.5 * h) * cprime(x0 + 0.5 * h));
        double qm = 1.0 / (cprime(x0 - 0.5 * h) * cprime(x0 - 0.5 * h));
        double wp = cprime(x0 + h) * v(x0 + h);
        double wm = cprime(x0 - h) * v(x0 - h);
        return (qp * wp - qm * wm) / (2 * h);
    }
    // secant: c' approximated from the samples themselves, bandwidth 2
    auto w = [&](double x) {
        return ((v(x) + v(x + h)) * (c(x + h) - c(x)) + (v(x) + v(x - h)) * (c(x) - c(x - h))) /
               (4 * h);
    };
    auto q = [&](double x) {
        double s = (c(x) - c(x0)) / h;
        return 1.0 / (s * s);
    };
    return (q(x0 + h) * w(x0 + h) - q(x0 - h) * w(x0 - h)) / (2 * h);
}

NonuniformDerivative nonuniform_derivative(std::function<double(double)> c,
                                           std::function<double(double)> cprime,
                                           NonuniformDerivative::Variant variant) {
    if (variant == NonuniformDerivative::Variant::midpoint && !cprime)
        throw std::invalid_argument("midpoint variant needs the analytic c'");
    return {variant, std::move(c), std::move(cprime)};
}

SkewTensor appendix_tensor(int n, double h) {
    if (n < 5) throw std::invalid_argument("ring too small");
    Lattice lat = Lattice::line1d(n, h);
    auto A = [&](int a, int b) -> Rat {
        if ((a + 1) % n == b) return Rat(1);
        if ((b + 1) % n == a) return Rat(-1);
        return Rat(0);
    };
    Rat c(1, n);
    SkewTensor out;
    out.rank = 3;
    out.lat = lat;
    out.m = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                Rat v = A(i, j) * c - A(i, k) * c + A(j, k) * c;
                if (v != Rat(0)) out.add({i, j, k}, v);
            }
    return out;
}

} // namespace skewfd
