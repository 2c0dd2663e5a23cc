#include "skewfd/skewtensor.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

namespace skewfd {

static long factorial(int n) {
    long f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

static std::string key_str(const Key& k) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
    os << ")";
    return os.str();
}

void SkewTensor::add(Key k, const Rat& v) {
    if (v == Rat(0)) return;
    // sort with parity; repeated sites vanish
    int sign = 1;
    for (size_t i = 0; i + 1 < k.size(); ++i) {
        size_t mn = i;
        for (size_t j = i + 1; j < k.size(); ++j)
            if (k[j] < k[mn]) mn = j;
        if (mn != i) {
            std::swap(k[i], k[mn]);
            sign = -sign;
        }
    }
    for (size_t i = 0; i + 1 < k.size(); ++i)
        if (k[i] == k[i + 1]) return;
    auto it = entries.find(k);
    if (it == entries.end()) {
        entries.emplace(std::move(k), sign > 0 ? v : -v);
    } else {
        it->second += (sign > 0 ? v : -v);
        if (it->second == Rat(0)) entries.erase(it);
    }
}

Rat SkewTensor::at(const Key& kin) const {
    Key k = kin;
    int sign = 1;
    for (size_t i = 0; i + 1 < k.size(); ++i) {
        size_t mn = i;
        for (size_t j = i + 1; j < k.size(); ++j)
            if (k[j] < k[mn]) mn = j;
        if (mn != i) {
            std::swap(k[i], k[mn]);
            sign = -sign;
        }
    }
    for (size_t i = 0; i + 1 < k.size(); ++i)
        if (k[i] == k[i + 1]) return Rat(0);
    auto it = entries.find(k);
    if (it == entries.end()) return Rat(0);
    return sign > 0 ? it->second : -it->second;
}

GeneralTensor delta_tensor(const Lattice& lat, int m, const MultiIndex& mi, const Rat& value) {
    GeneralTensor t;
    t.rank = (int)mi.size();
    t.lat = lat;
    t.m = m;
    if (value == Rat(0)) return t;
    Key k;
    for (const auto& s : mi) k.push_back(lat.site_code(s.l, s.alpha, m));
    t.entries[k] = value;
    return t;
}

SkewTensor symmetrize(const GeneralTensor& t, const SymmetryGroup& G) {
    SkewTensor out;
    out.rank = t.rank;
    out.lat = t.lat;
    out.m = t.m;
    const Lattice& lat = t.lat;

    std::vector<IVec> translations;
    if (G.translations) {
        translations = lat.all_sites();  // lattice translations preserving the site set
    } else {
        translations = {IVec(lat.d, 0)};
    }

    for (const auto& [key, val] : t.entries) {
        std::vector<SiteIndex> sites;
        for (long code : key) {
            int alpha = 0;
            IVec l = lat.site_from_code(code, t.m, &alpha);
            sites.push_back({l, alpha});
        }
        for (const auto& g : G.point_ops) {
            std::vector<SiteIndex> gs;
            gs.reserve(sites.size());
            for (const auto& s : sites) gs.push_back(g.apply(s));
            for (const auto& tr : translations) {
                int sgn = g.sign * G.translation_sign(tr);
                Key mapped;
                mapped.reserve(gs.size());
                bool ok = true;
                for (const auto& s : gs) {
                    IVec l(lat.d);
                    for (int k = 0; k < lat.d; ++k) l[k] = s.l[k] + tr[k];
                    IVec w = lat.wrap(l);
                    if (!lat.on_lattice(w)) { ok = false; break; }
                    mapped.push_back(lat.site_code(w, s.alpha, t.m));
                }
                if (!ok) continue;
                out.add(std::move(mapped), sgn > 0 ? val : -val);
            }
        }
    }
    // the canonical store identifies all permutation images, so the explicit
    // sum over S_rank collapses to a factor rank!
    Rat fact((long long)factorial(t.rank));
    for (auto& [k, v] : out.entries) v *= fact;
    return out;
}

CheckReport is_skew(const GeneralTensor& t) {
    // check every transposition on every stored key
    for (const auto& [key, val] : t.entries) {
        for (size_t a = 0; a < key.size(); ++a)
            for (size_t b = a + 1; b < key.size(); ++b) {
                Key swapped = key;
                std::swap(swapped[a], swapped[b]);
                Rat other(0);
                auto it = t.entries.find(swapped);
                if (it != t.entries.end()) other = it->second;
                if (key[a] == key[b]) {
                    if (val != Rat(0))
                        return {false, "repeated-index entry nonzero at " + key_str(key)};
                    continue;
                }
                if (other != -val)
                    return {false, "transposition mismatch at " + key_str(key)};
            }
    }
    return {true, ""};
}

CheckReport is_skew(const SkewTensor&) { return {true, ""}; }

CheckReport is_g_invariant(const SkewTensor& t, const SymmetryGroup& G) {
    const Lattice& lat = t.lat;
    std::vector<IVec> translations;
    if (G.translations) translations = lat.all_sites();
    else translations = {IVec(lat.d, 0)};

    for (const auto& [key, val] : t.entries) {
        std::vector<SiteIndex> sites;
        for (long code : key) {
            int alpha = 0;
            IVec l = lat.site_from_code(code, t.m, &alpha);
            sites.push_back({l, alpha});
        }
        for (const auto& g : G.point_ops) {
            for (const auto& tr : translations) {
                int sgn = g.sign * G.translation_sign(tr);
                Key mapped;
                bool ok = true;
                for (const auto& s : sites) {
                    SiteIndex gs = g.apply(s);
                    IVec l(lat.d);
                    for (int k = 0; k < lat.d; ++k) l[k] = gs.l[k] + tr[k];
                    IVec w = lat.wrap(l);
                    if (!lat.on_lattice(w)) { ok = false; break; }
                    mapped.push_back(lat.site_code(w, gs.alpha, t.m));
                }
                if (!ok) continue;
                if (t.at(mapped) != (sgn > 0 ? val : -val))
                    return {false, "g-invariance fails at " + key_str(key)};
            }
        }
    }
    return {true, ""};
}

double bandwidth(const SkewTensor& t, Metric metric) {
    double best = 0;
    for (const auto& [key, val] : t.entries) {
        for (size_t a = 0; a < key.size(); ++a)
            for (size_t b = a + 1; b < key.size(); ++b) {
                IVec la = t.lat.site_from_code(key[a], t.m);
                IVec lb = t.lat.site_from_code(key[b], t.m);
                double dd = metric == Metric::graph
                                ? (double)t.lat.graph_distance(la, lb)
                                : t.lat.euclidean_distance(la, lb);
                best = std::max(best, dd);
            }
    }
    return best;
}

template <class S>
static S det_small(std::vector<std::vector<S>> a) {
    const int n = (int)a.size();
    if (n == 0) return S(1);
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    // cofactor expansion, n <= 4 in practice
    S acc(0);
    for (int j = 0; j < n; ++j) {
        std::vector<std::vector<S>> sub(n - 1, std::vector<S>(n - 1));
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                sub[r - 1][cc++] = a[r][c];
            }
        }
        S term = a[0][j] * det_small(sub);
        if (j % 2 == 0) acc += term;
        else acc -= term;
    }
    return acc;
}

template <class S>
std::vector<S> contract(const SkewTensor& t, const std::vector<std::vector<S>>& grads) {
    const int p = t.rank - 1;
    if ((int)grads.size() != p) throw std::invalid_argument("grad count must be rank-1");
    long nsites = t.lat.box_size() * t.m;
    std::vector<S> F(nsites, S(0));
    for (const auto& [key, q] : t.entries) {
        for (int slot = 0; slot < t.rank; ++slot) {
            // K_{s_slot, remaining ascending} = (-1)^slot * q
            std::vector<std::vector<S>> V(p, std::vector<S>(p));
            int col = 0;
            for (int j = 0; j < t.rank; ++j) {
                if (j == slot) continue;
                for (int r = 0; r < p; ++r) V[r][col] = grads[r][key[j]];
                ++col;
            }
            S term = det_small(V);
            if constexpr (std::is_same_v<S, double>) {
                term *= to_double(q);
            } else {
                term *= q;
            }
            if (slot % 2) F[key[slot]] -= term;
            else F[key[slot]] += term;
        }
    }
    return F;
}

template std::vector<double> contract<double>(const SkewTensor&,
                                              const std::vector<std::vector<double>>&);
template std::vector<Rat> contract<Rat>(const SkewTensor&, const std::vector<std::vector<Rat>>&);

SkewTensor contract_partial(const SkewTensor& t, const std::vector<Rat>& grad) {
    if (t.rank < 2) throw std::invalid_argument("rank must be at least 2");
    SkewTensor out;
    out.rank = t.rank - 1;
    out.lat = t.lat;
    out.m = t.m;
    for (const auto& [key, q] : t.entries) {
        for (int slot = 0; slot < t.rank; ++slot) {
            Key rest;
            rest.reserve(key.size() - 1);
            for (int j = 0; j < t.rank; ++j)
                if (j != slot) rest.push_back(key[j]);
            Rat term = q * grad[key[slot]];
            if (slot % 2) term = -term;
            out.add(std::move(rest), term);
        }
    }
    return out;
}

std::vector<double> StateTensor2::contract(const std::vector<double>& u,
                                           const std::vector<double>& v) const {
    std::vector<double> F(v.size(), 0.0);
    for (const auto& k : support) F[k[0]] += entry(u, k[0], k[1]) * v[k[1]];
    return F;
}

StateTensor2 modulate(const SkewTensor& t, const SymmetricModulation& mod) {
    if (t.rank != 2) throw std::invalid_argument("modulation requires rank 2");
    // spot-check symmetry of q
    const double xs[] = {0.0, 0.7, -1.3};
    const double us[] = {0.4, -0.9, 2.1};
    for (double xi : xs)
        for (double xj : xs)
            for (double ui : us)
                for (double uj : us)
                    if (std::abs(mod.q(xi, xj, ui, uj) - mod.q(xj, xi, uj, ui)) > 1e-12)
                        throw std::invalid_argument("modulation q is not symmetric");

    StateTensor2 out;
    out.lat = t.lat;
    struct Term { long i, j; double coef; };
    auto terms = std::make_shared<std::vector<Term>>();
    for (const auto& [key, q] : t.entries) {
        terms->push_back({key[0], key[1], to_double(q)});
        terms->push_back({key[1], key[0], -to_double(q)});
        out.support.push_back({key[0], key[1]});
        out.support.push_back({key[1], key[0]});
    }
    Lattice lat = t.lat;
    int m = t.m;
    auto q = mod.q;
    out.entry = [terms, lat, m, q](const std::vector<double>& u, long i, long j) -> double {
        for (const auto& tm : *terms) {
            if (tm.i == i && tm.j == j) {
                DVec xi = lat.coords(lat.site_from_code(i, m));
                DVec xj = lat.coords(lat.site_from_code(j, m));
                return tm.coef * q(xi[0], xj[0], u[i], u[j]);
            }
        }
        return 0.0;
    };
    return out;
}

double divergence_residual(const StateTensor2& t, const std::vector<double>& u) {
    double umax = 0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    const double delta = std::max(1e-6, 1e-6 * umax);

    // S_j = sum_i dK_ij/du_i, entries only on the declared support
    std::vector<double> S(u.size(), 0.0);
    for (const auto& k : t.support) {
        long i = k[0], j = k[1];
        std::vector<double> up = u, um = u;
        up[i] += delta;
        um[i] -= delta;
        S[j] += (t.entry(up, i, j) - t.entry(um, i, j)) / (2 * delta);
    }
    double best = 0;
    for (double s : S) best = std::max(best, std::abs(s));
    return best;
}

} // namespace skewfd
