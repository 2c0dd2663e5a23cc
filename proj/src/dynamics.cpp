#include "skewfd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skewfd/stencil.hpp"

namespace skewfd {

IntegralFunctional quadratic_half_sum(double w, const std::string& name) {
    return {name,
            [w](const std::vector<double>& u) {
                double s = 0;
                for (double v : u) s += v * v;
                return 0.5 * w * s;
            },
            [w](const std::vector<double>& u) {
                std::vector<double> g(u.size());
                for (size_t i = 0; i < u.size(); ++i) g[i] = w * u[i];
                return g;
            }};
}

IntegralFunctional cubic_third_sum(double w, const std::string& name) {
    return {name,
            [w](const std::vector<double>& u) {
                double s = 0;
                for (double v : u) s += v * v * v;
                return w * s / 3.0;
            },
            [w](const std::vector<double>& u) {
                std::vector<double> g(u.size());
                for (size_t i = 0; i < u.size(); ++i) g[i] = w * u[i] * u[i];
                return g;
            }};
}

IntegralFunctional linear_sum(double w, const std::string& name) {
    return {name,
            [w](const std::vector<double>& u) {
                double s = 0;
                for (double v : u) s += v;
                return w * s;
            },
            [w](const std::vector<double>& u) { return std::vector<double>(u.size(), w); }};
}

void gradient_self_check(const ConservativeSystem& sys, const std::vector<double>& u,
                         double tol) {
    for (const auto& I : sys.integrals) {
        auto g = I.grad(u);
        double gmax = 0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        const size_t stride = std::max<size_t>(1, u.size() / 8);
        for (size_t i = 0; i < u.size(); i += stride) {
            double delta = 1e-5 * (1.0 + std::abs(u[i]));
            auto up = u, um = u;
            up[i] += delta;
            um[i] -= delta;
            double fd = (I.eval(up) - I.eval(um)) / (2 * delta);
            if (std::abs(fd - g[i]) > tol * (1.0 + gmax))
                throw std::runtime_error("gradient self-check failed for " + I.name);
        }
    }
}

std::vector<double> rhs(const ConservativeSystem& sys, const std::vector<double>& u) {
    if (sys.validate) sys.validate(u);
    std::vector<std::vector<double>> grads;
    for (const auto& I : sys.integrals) grads.push_back(I.grad(u));
    auto F = contract<double>(sys.K, grads);
    for (auto& f : F) f *= sys.scale;
    return F;
}

std::vector<std::vector<double>> skew_form_from_field(const std::vector<double>& f,
                                                      const std::vector<double>& gradH,
                                                      double singular_tol) {
    const size_t n = f.size();
    double denom = 0;
    for (size_t i = 0; i < n; ++i) denom += gradH[i] * gradH[i];  // z = gradH
    if (denom < singular_tol) throw std::domain_error("skew form singular: |gradH| ~ 0");
    std::vector<std::vector<double>> J(n, std::vector<double>(n, 0.0));
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) J[a][b] = (f[a] * gradH[b] - gradH[a] * f[b]) / denom;
    return J;
}

static std::vector<double> axpy(const std::vector<double>& x, double a,
                                const std::vector<double>& y) {
    std::vector<double> r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

std::vector<double> step_rk4(const ConservativeSystem& sys, const std::vector<double>& u,
                             double dt) {
    auto k1 = rhs(sys, u);
    auto k2 = rhs(sys, axpy(u, dt / 2, k1));
    auto k3 = rhs(sys, axpy(u, dt / 2, k2));
    auto k4 = rhs(sys, axpy(u, dt, k3));
    std::vector<double> out(u.size());
    for (size_t i = 0; i < u.size(); ++i)
        out[i] = u[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

static double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

static bool midpoint_fixed_point(const ConservativeSystem& sys, const std::vector<double>& u,
                                 double dt, double tol, int max_iter, std::vector<double>& v) {
    const double target = tol * (1.0 + inf_norm(u));
    v = u;
    for (int it = 0; it < max_iter; ++it) {
        auto mid = axpy(u, 0.0, u);
        for (size_t i = 0; i < u.size(); ++i) mid[i] = 0.5 * (u[i] + v[i]);
        auto vn = axpy(u, dt, rhs(sys, mid));
        double diff = 0;
        for (size_t i = 0; i < u.size(); ++i) diff = std::max(diff, std::abs(vn[i] - v[i]));
        v = std::move(vn);
        if (diff <= target) return true;
    }
    return false;
}

static bool midpoint_newton(const ConservativeSystem& sys, const std::vector<double>& u,
                            double dt, double tol, std::vector<double>& v) {
    const size_t n = u.size();
    if (n > 128) return false;
    auto G = [&](const std::vector<double>& w) {
        std::vector<double> mid(n);
        for (size_t i = 0; i < n; ++i) mid[i] = 0.5 * (u[i] + w[i]);
        auto F = rhs(sys, mid);
        std::vector<double> g(n);
        for (size_t i = 0; i < n; ++i) g[i] = w[i] - u[i] - dt * F[i];
        return g;
    };
    v = u;
    for (int it = 0; it < 25; ++it) {
        auto g = G(v);
        if (inf_norm(g) <= tol * (1.0 + inf_norm(u))) return true;
        // finite-difference Jacobian
        std::vector<std::vector<double>> J(n, std::vector<double>(n));
        const double delta = 1e-7 * (1.0 + inf_norm(v));
        for (size_t c = 0; c < n; ++c) {
            auto vp = v;
            vp[c] += delta;
            auto gp = G(vp);
            for (size_t r = 0; r < n; ++r) J[r][c] = (gp[r] - g[r]) / delta;
        }
        // solve J s = g
        std::vector<double> s = g;
        for (size_t c = 0; c < n; ++c) {
            size_t piv = c;
            for (size_t r = c + 1; r < n; ++r)
                if (std::abs(J[r][c]) > std::abs(J[piv][c])) piv = r;
            if (std::abs(J[piv][c]) < 1e-14) return false;
            std::swap(J[c], J[piv]);
            std::swap(s[c], s[piv]);
            for (size_t r = 0; r < n; ++r) {
                if (r == c) continue;
                double f = J[r][c] / J[c][c];
                for (size_t k = c; k < n; ++k) J[r][k] -= f * J[c][k];
                s[r] -= f * s[c];
            }
        }
        for (size_t i = 0; i < n; ++i) v[i] -= s[i] / J[i][i];
    }
    return inf_norm(G(v)) <= tol * (1.0 + inf_norm(u));
}

static std::vector<double> midpoint_rec(const ConservativeSystem& sys,
                                        const std::vector<double>& u, double dt, double tol,
                                        int max_iter, int depth) {
    std::vector<double> v;
    if (midpoint_fixed_point(sys, u, dt, tol, max_iter, v)) return v;
    if (midpoint_newton(sys, u, dt, tol, v)) return v;
    if (depth >= 3) throw std::runtime_error("midpoint solve failed after 3 dt halvings");
    auto half = midpoint_rec(sys, u, dt / 2, tol, max_iter, depth + 1);
    return midpoint_rec(sys, half, dt / 2, tol, max_iter, depth + 1);
}

std::vector<double> step_midpoint(const ConservativeSystem& sys, const std::vector<double>& u,
                                  double dt, double tol, int max_iter) {
    if (dt == 0.0) return u;
    return midpoint_rec(sys, u, dt, tol, max_iter, 0);
}

Method method_from_name(const std::string& s) {
    if (s == "midpoint") return Method::midpoint;
    if (s == "rk4") return Method::rk4;
    throw std::invalid_argument("unknown method: " + s);
}

TrajectoryRecord integrate(const ConservativeSystem& sys, const std::vector<double>& u0,
                           double dt, int n_steps, Method method, int snapshot_stride,
                           double tol) {
    gradient_self_check(sys, u0);
    TrajectoryRecord rec;
    rec.snapshot_stride = snapshot_stride;
    auto u = u0;
    auto record = [&](double t) {
        rec.times.push_back(t);
        std::vector<double> vals;
        for (const auto& I : sys.integrals) vals.push_back(I.eval(u));
        rec.integrals.push_back(std::move(vals));
    };
    record(0.0);
    rec.snapshots.push_back(u);
    for (int s = 1; s <= n_steps; ++s) {
        u = method == Method::midpoint ? step_midpoint(sys, u, dt, tol) : step_rk4(sys, u, dt);
        record(s * dt);
        if (snapshot_stride > 0 && s % snapshot_stride == 0) rec.snapshots.push_back(u);
    }
    return rec;
}

// --- 2D incompressible flow ---

std::vector<double> poisson_solve(const std::vector<double>& q, int n, double h, double tol) {
    const size_t N = q.size();
    auto idx = [n](int i, int j) { return (long)(((i % n) + n) % n) * n + ((j % n) + n) % n; };
    auto apply = [&](const std::vector<double>& x) {
        std::vector<double> y(N);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                y[idx(i, j)] = (4 * x[idx(i, j)] - x[idx(i + 1, j)] - x[idx(i - 1, j)] -
                                x[idx(i, j + 1)] - x[idx(i, j - 1)]) /
                               (h * h);
        return y;
    };
    auto project = [&](std::vector<double>& x) {
        double mean = 0;
        for (double v : x) mean += v;
        mean /= (double)N;
        for (double& v : x) v -= mean;
    };
    std::vector<double> b = q;
    project(b);
    std::vector<double> x(N, 0.0), r = b, p = b;
    double rr = 0;
    for (double v : r) rr += v * v;
    const double stop = tol * tol * std::max(rr, 1e-300);
    for (size_t it = 0; it < 4 * N && rr > stop; ++it) {
        auto Ap = apply(p);
        double pAp = 0;
        for (size_t i = 0; i < N; ++i) pAp += p[i] * Ap[i];
        double alpha = rr / pAp;
        for (size_t i = 0; i < N; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double rr2 = 0;
        for (double v : r) rr2 += v * v;
        for (size_t i = 0; i < N; ++i) p[i] = r[i] + (rr2 / rr) * p[i];
        rr = rr2;
    }
    project(x);
    return x;
}

std::vector<double> arakawa_reference(const std::vector<double>& psi,
                                      const std::vector<double>& q, int n, double h) {
    auto at = [n](const std::vector<double>& u, int i, int j) {
        return u[(long)(((i % n) + n) % n) * n + ((j % n) + n) % n];
    };
    std::vector<double> J(psi.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double jpp = (at(psi, i + 1, j) - at(psi, i - 1, j)) *
                             (at(q, i, j + 1) - at(q, i, j - 1)) -
                         (at(psi, i, j + 1) - at(psi, i, j - 1)) *
                             (at(q, i + 1, j) - at(q, i - 1, j));
            double jpx = at(psi, i + 1, j) * (at(q, i + 1, j + 1) - at(q, i + 1, j - 1)) -
                         at(psi, i - 1, j) * (at(q, i - 1, j + 1) - at(q, i - 1, j - 1)) -
                         at(psi, i, j + 1) * (at(q, i + 1, j + 1) - at(q, i - 1, j + 1)) +
                         at(psi, i, j - 1) * (at(q, i + 1, j - 1) - at(q, i - 1, j - 1));
            double jxp = at(psi, i + 1, j + 1) * (at(q, i, j + 1) - at(q, i + 1, j)) -
                         at(psi, i - 1, j - 1) * (at(q, i - 1, j) - at(q, i, j - 1)) -
                         at(psi, i - 1, j + 1) * (at(q, i, j + 1) - at(q, i - 1, j)) +
                         at(psi, i + 1, j - 1) * (at(q, i + 1, j) - at(q, i, j - 1));
            J[(long)i * n + j] = (jpp + jpx + jxp) / (12 * h * h);
        }
    return J;
}

ConservativeSystem euler2d_system(int n, double h) {
    ConservativeSystem sys;
    sys.lat = Lattice::square2d(n, h);
    sys.K = to_tensor(arakawa(h), sys.lat);
    sys.scale = -1.0 / (12.0 * std::pow(h, 6));
    sys.validate = [n](const std::vector<double>& q) {
        double mean = 0, amp = 0;
        for (double v : q) {
            mean += v;
            amp = std::max(amp, std::abs(v));
        }
        mean /= (double)q.size();
        if (std::abs(mean) > 1e-10 * std::max(1.0, amp))
            throw std::invalid_argument("vorticity must have zero mean");
    };
    double w = h * h;
    sys.integrals.push_back({"enstrophy",
                             [w](const std::vector<double>& q) {
                                 double s = 0;
                                 for (double v : q) s += v * v;
                                 return 0.5 * w * s;
                             },
                             [w](const std::vector<double>& q) {
                                 std::vector<double> g(q.size());
                                 for (size_t i = 0; i < q.size(); ++i) g[i] = w * q[i];
                                 return g;
                             }});
    sys.integrals.push_back({"energy",
                             [w, n, h](const std::vector<double>& q) {
                                 auto psi = poisson_solve(q, n, h);
                                 double s = 0;
                                 for (size_t i = 0; i < q.size(); ++i) s += q[i] * psi[i];
                                 return 0.5 * w * s;
                             },
                             [w, n, h](const std::vector<double>& q) {
                                 auto psi = poisson_solve(q, n, h);
                                 for (double& v : psi) v *= w;
                                 return psi;
                             }});
    return sys;
}

} // namespace skewfd
