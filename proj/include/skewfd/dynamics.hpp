#pragma once

#include <functional>
#include <string>
#include <vector>

#include "skewfd/skewtensor.hpp"

namespace skewfd {

/// Discrete functional with its analytic gradient.
struct IntegralFunctional {
    std::string name;
    std::function<double(const std::vector<double>&)> eval;
    std::function<std::vector<double>(const std::vector<double>&)> grad;
};

IntegralFunctional quadratic_half_sum(double weight, const std::string& name = "I");  // w/2 sum u^2
IntegralFunctional cubic_third_sum(double weight, const std::string& name = "I");     // w/3 sum u^3
IntegralFunctional linear_sum(double weight, const std::string& name = "I");          // w sum u

/// du/dt = scale * K(grad I^1, ..., grad I^p).
struct ConservativeSystem {
    Lattice lat;
    SkewTensor K;
    double scale = 1.0;
    std::vector<IntegralFunctional> integrals;
    std::function<void(const std::vector<double>&)> validate;  // optional state check
};

/// Compares every analytic gradient against central differences of eval;
/// throws when the relative mismatch exceeds tol. Called once per system.
void gradient_self_check(const ConservativeSystem& sys, const std::vector<double>& u,
                         double tol = 1e-6);

std::vector<double> rhs(const ConservativeSystem& sys, const std::vector<double>& u);

/// Pointwise skew form J = (f z^t - z f^t) / (z . gradH) with z = gradH;
/// satisfies J gradH = f whenever f . gradH = 0.
std::vector<std::vector<double>> skew_form_from_field(const std::vector<double>& f,
                                                      const std::vector<double>& gradH,
                                                      double singular_tol = 1e-12);

std::vector<double> step_rk4(const ConservativeSystem& sys, const std::vector<double>& u,
                             double dt);

/// Implicit midpoint: solves u' = u + dt rhs((u+u')/2) by fixed-point
/// iteration with a finite-difference Newton fallback on small systems;
/// halves dt (up to 3 times) on non-convergence, then throws.
std::vector<double> step_midpoint(const ConservativeSystem& sys, const std::vector<double>& u,
                                  double dt, double tol = 1e-13, int max_iter = 200);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<std::vector<double>> integrals;  // per step, one value per functional
    std::vector<std::vector<double>> snapshots;
    int snapshot_stride = 0;  // 0: only the initial state is kept
};

enum class Method { midpoint, rk4 };
Method method_from_name(const std::string& s);

TrajectoryRecord integrate(const ConservativeSystem& sys, const std::vector<double>& u0,
                           double dt, int n_steps, Method method, int snapshot_stride = 0,
                           double tol = 1e-13);

/// 2D incompressible flow in vorticity form on an n x n torus: conserves
/// enstrophy (h^2/2) sum q^2 and energy (h^2/2) sum q psi with
/// psi = (-laplacian)^{-1} q (5-point, conjugate gradients, mean projected out).
ConservativeSystem euler2d_system(int n, double h);

/// Classical 9-point energy- and enstrophy-conserving Jacobian, coded
/// directly from its textbook form as an independent reference.
std::vector<double> arakawa_reference(const std::vector<double>& psi,
                                      const std::vector<double>& q, int n, double h);

/// Poisson solve (-laplacian) psi = q on the torus; q must have zero mean.
std::vector<double> poisson_solve(const std::vector<double>& q, int n, double h,
                                  double tol = 1e-13);

} // namespace skewfd
