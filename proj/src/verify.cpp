#include "skewfd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace skewfd {

Quad Quad::inverse() const {
    Rat n = a * a - Rat(3) * b * b;  // norm, nonzero for nonzero elements
    if (n == Rat(0)) throw std::domain_error("division by zero in Q[sqrt(3)]");
    return {a / n, -b / n};
}

// --- operator presets ---

DerivOperator op_dx(int d, Rat coef) {
    IVec o(d, 0);
    o[0] = 1;
    return {"dx", d, 1, {{coef, {o}}}};
}

DerivOperator op_dxxx(Rat coef) { return {"dxxx", 1, 1, {{coef, {{3}}}}}; }

DerivOperator op_jacobian2d(Rat coef) {
    return {"jacobian", 2, 2, {{coef, {{1, 0}, {0, 1}}}, {-coef, {{0, 1}, {1, 0}}}}};
}

DerivOperator op_pair_vpww() { return {"v'w''-w'v''", 1, 2, {{Rat(1), {{1}, {2}}}, {Rat(-1), {{2}, {1}}}}}; }

DerivOperator op_pair_vwww() { return {"vw'''-wv'''", 1, 2, {{Rat(1), {{0}, {3}}}, {Rat(-1), {{3}, {0}}}}}; }

DerivOperator op_cyclic_jacobian3(Rat coef) {
    DerivOperator op{"cyclic v1 J(v2,v3)", 2, 3, {}};
    const IVec z = {0, 0}, dx = {1, 0}, dy = {0, 1};
    for (int c = 0; c < 3; ++c) {
        std::vector<IVec> plus(3), minus(3);
        plus[c] = z;
        plus[(c + 1) % 3] = dx;
        plus[(c + 2) % 3] = dy;
        minus[c] = z;
        minus[(c + 1) % 3] = dy;
        minus[(c + 2) % 3] = dx;
        op.terms.push_back({coef, plus});
        op.terms.push_back({-coef, minus});
    }
    return op;
}

DerivOperator op_det_grad3(Rat coef) {
    DerivOperator op{"det grad", 3, 3, {}};
    const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
    for (int k = 0; k < 6; ++k) {
        std::vector<IVec> orders(3, IVec(3, 0));
        for (int j = 0; j < 3; ++j) orders[j][perms[k][j]] = 1;
        op.terms.push_back({k < 3 ? coef : -coef, orders});
    }
    return op;
}

// --- smooth test functions ---

static SmoothFn sine_fn(DVec a, double phase) {
    return {[a = std::move(a), phase](const DVec& x, const IVec& order) {
        double arg = phase, amp = 1.0;
        long total = 0;
        for (size_t k = 0; k < x.size(); ++k) {
            arg += a[k] * x[k];
            for (int q = 0; q < order[k]; ++q) amp *= a[k];
            total += order[k];
        }
        return amp * std::sin(arg + total * 1.5707963267948966);
    }};
}

std::vector<std::vector<SmoothFn>> test_tuples(int d, int p, int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> wav(0.5, 1.8), ph(0.0, 6.28);
    std::vector<std::vector<SmoothFn>> out;
    for (int t = 0; t < count; ++t) {
        std::vector<SmoothFn> tuple;
        for (int j = 0; j < p; ++j) {
            DVec a(d);
            for (auto& v : a) v = wav(rng);
            tuple.push_back(sine_fn(std::move(a), ph(rng)));
        }
        out.push_back(std::move(tuple));
    }
    return out;
}

double apply_operator(const DerivOperator& op, const std::vector<SmoothFn>& fns, const DVec& x) {
    if ((int)fns.size() != op.p) throw std::invalid_argument("argument count mismatch");
    double acc = 0;
    for (const auto& t : op.terms) {
        double prod = to_double(t.coef);
        for (int j = 0; j < op.p; ++j) prod *= fns[j].deriv(x, t.orders[j]);
        acc += prod;
    }
    return acc;
}

RefinementStudy fit_slope(const std::vector<double>& hs, const std::vector<double>& errors,
                          double residual_tol) {
    RefinementStudy s;
    s.hs = hs;
    s.errors = errors;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = (int)hs.size();
    for (int i = 0; i < n; ++i) {
        double lx = std::log10(hs[i]), ly = std::log10(std::max(errors[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    s.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - s.slope * sx) / n;
    double rss = 0;
    for (int i = 0; i < n; ++i) {
        double dev = std::log10(std::max(errors[i], 1e-300)) -
                     (icpt + s.slope * std::log10(hs[i]));
        rss += dev * dev;
    }
    s.residual = std::sqrt(rss / n);
    s.consistent = s.residual <= residual_tol;
    return s;
}

RefinementStudy order_estimate(const Stencil& st, const DerivOperator& target,
                               const std::vector<std::vector<SmoothFn>>& tests, int scale_power,
                               int levels, double h0, double residual_tol) {
    std::vector<double> hs, errs;
    std::vector<DVec> points;
    const int d = st.lat.d;
    points.push_back(DVec(d, 0.0));
    points.push_back(DVec(d, 0.31));
    points.push_back(DVec(d, -0.47));
    for (int lev = 0; lev < levels; ++lev) {
        double h = h0 / std::pow(2.0, lev);
        double err = 0;
        for (const auto& tuple : tests) {
            std::vector<std::function<double(const DVec&)>> fns;
            for (const auto& f : tuple)
                fns.push_back([&f](const DVec& x) { return f(x); });
            for (const auto& x0 : points) {
                double approx =
                    evaluate_smooth(st, fns, x0, h, false) / std::pow(h, scale_power);
                err = std::max(err, std::abs(approx - apply_operator(target, tuple, x0)));
            }
        }
        hs.push_back(h);
        errs.push_back(err);
    }
    return fit_slope(hs, errs, residual_tol);
}

// --- exact leading-term oracle ---

namespace {

std::vector<Quad> offset_coords_exact(const Lattice& lat, const IVec& off) {
    std::vector<Quad> x;
    if (lat.kind == LatticeKind::triangular2d) {
        x.push_back(Quad(Rat(off[0]) + Rat(off[1], 2)));
        x.push_back(Quad(Rat(0), Rat(off[1], 2)));  // (sqrt(3)/2) * l1
        return x;
    }
    for (int v : off) x.push_back(Quad(Rat(v)));
    return x;
}

Quad qpow(const Quad& x, int e) {
    Quad r{Rat(1)};
    for (int k = 0; k < e; ++k) r = r * x;
    return r;
}

Quad det_quad(std::vector<std::vector<Quad>> a) {
    const int n = (int)a.size();
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    Quad acc;
    for (int j = 0; j < n; ++j) {
        std::vector<std::vector<Quad>> sub(n - 1, std::vector<Quad>(n - 1));
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c)
                if (c != j) sub[r - 1][cc++] = a[r][c];
        }
        Quad t = a[0][j] * det_quad(sub);
        acc = (j % 2 == 0) ? acc + t : acc - t;
    }
    return acc;
}

void enumerate_exponents(int d, int max_deg, std::vector<IVec>& out) {
    IVec e(d, 0);
    while (true) {
        int s = 0;
        for (int v : e) s += v;
        if (s <= max_deg) out.push_back(e);
        int k = d - 1;
        while (k >= 0 && ++e[k] > max_deg) e[k--] = 0;
        if (k < 0) break;
    }
}

long factorial_l(int n) {
    long f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// derivative of the monomial x^e at 0 with multi-order o: e! when o == e, else 0
Rat monomial_deriv0(const IVec& e, const IVec& o) {
    if (e != o) return Rat(0);
    Rat f(1);
    for (int v : e) f *= Rat(factorial_l(v));
    return f;
}

// solves the square system G x = r over Q[sqrt(3)] by Gaussian elimination
std::vector<Quad> solve_quad(std::vector<std::vector<Quad>> G, std::vector<Quad> r) {
    const int n = (int)G.size();
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int q = c; q < n; ++q)
            if (!G[q][c].is_zero()) {
                piv = q;
                break;
            }
        if (piv < 0) throw std::runtime_error("rank-deficient basis");
        std::swap(G[c], G[piv]);
        std::swap(r[c], r[piv]);
        Quad inv = G[c][c].inverse();
        for (int q = 0; q < n; ++q) G[c][q] = G[c][q] * inv;
        r[c] = r[c] * inv;
        for (int q = 0; q < n; ++q) {
            if (q == c || G[q][c].is_zero()) continue;
            Quad f = G[q][c];
            for (int k = 0; k < n; ++k) G[q][k] = G[q][k] - f * G[c][k];
            r[q] = r[q] - f * r[c];
        }
    }
    return r;
}

} // namespace

LeadingFit fit_leading_operator(const Stencil& st, const std::vector<DerivOperator>& basis,
                                int max_degree) {
    if (st.m != 1) throw std::invalid_argument("oracle requires m = 1");
    const int d = st.lat.d, p = st.p;

    std::vector<IVec> exps;
    enumerate_exponents(d, max_degree, exps);

    // all p-tuples of exponents with bounded total degree
    std::vector<std::vector<IVec>> tuples;
    std::vector<IVec> cur(p);
    std::function<void(int, int)> rec = [&](int j, int deg_left) {
        if (j == p) {
            tuples.push_back(cur);
            return;
        }
        for (const auto& e : exps) {
            int s = 0;
            for (int v : e) s += v;
            if (s > deg_left) continue;
            cur[j] = e;
            rec(j + 1, deg_left - s);
        }
    };
    rec(0, max_degree);

    // exact stencil value on each tuple: a single power h^D with a Quad coefficient
    std::vector<Quad> values(tuples.size());
    std::vector<int> degrees(tuples.size());
    for (size_t t = 0; t < tuples.size(); ++t) {
        int D = 0;
        for (const auto& e : tuples[t])
            for (int v : e) D += v;
        degrees[t] = D;
        Quad acc;
        for (const auto& a : st.arrows) {
            std::vector<std::vector<Quad>> M(p, std::vector<Quad>(p));
            for (int k = 0; k < p; ++k) {
                auto xc = offset_coords_exact(st.lat, a.offsets[k]);
                for (int j = 0; j < p; ++j) {
                    Quad m{Rat(1)};
                    for (int q = 0; q < d; ++q) m = m * qpow(xc[q], tuples[t][j][q]);
                    M[j][k] = m;
                }
            }
            Quad term = det_quad(M);
            acc = acc + Quad(a.coef) * term;
        }
        values[t] = acc;
    }

    LeadingFit fit;
    fit.hpower = -1;
    for (size_t t = 0; t < tuples.size(); ++t)
        if (!values[t].is_zero() && (fit.hpower < 0 || degrees[t] < fit.hpower))
            fit.hpower = degrees[t];
    if (fit.hpower < 0) return fit;  // empty stencil

    // rows: tuples at the leading degree
    const int nb = (int)basis.size();
    std::vector<std::vector<Quad>> A;
    std::vector<Quad> b;
    for (size_t t = 0; t < tuples.size(); ++t) {
        if (degrees[t] != fit.hpower) continue;
        std::vector<Quad> row(nb);
        for (int q = 0; q < nb; ++q) {
            Rat v(0);
            for (const auto& term : basis[q].terms) {
                Rat prod = term.coef;
                for (int j = 0; j < p && prod != Rat(0); ++j)
                    prod *= monomial_deriv0(tuples[t][j], term.orders[j]);
                v += prod;
            }
            row[q] = Quad(v);
        }
        A.push_back(std::move(row));
        b.push_back(values[t]);
    }

    // normal equations, exact
    std::vector<std::vector<Quad>> G(nb, std::vector<Quad>(nb));
    std::vector<Quad> r(nb);
    for (size_t i = 0; i < A.size(); ++i)
        for (int q = 0; q < nb; ++q) {
            for (int k = 0; k < nb; ++k) G[q][k] = G[q][k] + A[i][q] * A[i][k];
            r[q] = r[q] + A[i][q] * b[i];
        }
    auto x = solve_quad(G, r);

    fit.exact = true;
    for (size_t i = 0; i < A.size(); ++i) {
        Quad res;
        for (int q = 0; q < nb; ++q) res = res + A[i][q] * x[q];
        if (!(res == b[i])) fit.exact = false;
    }
    fit.coeffs.resize(nb);
    for (int q = 0; q < nb; ++q) fit.coeffs[q] = x[q].to_d();

    // floating cross-check: same rows, double arithmetic
    {
        std::vector<std::vector<double>> Gd(nb, std::vector<double>(nb, 0.0));
        std::vector<double> rd(nb, 0.0);
        for (size_t i = 0; i < A.size(); ++i)
            for (int q = 0; q < nb; ++q) {
                for (int k = 0; k < nb; ++k) Gd[q][k] += A[i][q].to_d() * A[i][k].to_d();
                rd[q] += A[i][q].to_d() * b[i].to_d();
            }
        // Gaussian elimination in double
        for (int c = 0; c < nb; ++c) {
            int piv = c;
            for (int q = c + 1; q < nb; ++q)
                if (std::abs(Gd[q][c]) > std::abs(Gd[piv][c])) piv = q;
            std::swap(Gd[c], Gd[piv]);
            std::swap(rd[c], rd[piv]);
            for (int q = 0; q < nb; ++q) {
                if (q == c) continue;
                double f = Gd[q][c] / Gd[c][c];
                for (int k = 0; k < nb; ++k) Gd[q][k] -= f * Gd[c][k];
                rd[q] -= f * rd[c];
            }
        }
        fit.float_agreement = 0;
        for (int q = 0; q < nb; ++q)
            fit.float_agreement =
                std::max(fit.float_agreement, std::abs(rd[q] / Gd[q][q] - fit.coeffs[q]));
    }
    return fit;
}

Rat conservation_residual(const SkewTensor& K, const std::vector<std::vector<Rat>>& grads) {
    auto F = contract<Rat>(K, grads);
    Rat best(0);
    for (const auto& g : grads) {
        Rat s(0);
        for (size_t i = 0; i < F.size(); ++i) s += F[i] * g[i];
        if (s < Rat(0)) s = -s;
        if (s > best) best = s;
    }
    return best;
}

double conservation_residual(const SkewTensor& K, const std::vector<std::vector<double>>& grads) {
    auto F = contract<double>(K, grads);
    double best = 0;
    for (const auto& g : grads) {
        double s = 0;
        for (size_t i = 0; i < F.size(); ++i) s += F[i] * g[i];
        best = std::max(best, std::abs(s));
    }
    return best;
}

} // namespace skewfd
