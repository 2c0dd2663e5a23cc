// skewfd command-line front end: builds symmetrized stencils, verifies their
// order/conservation properties, and runs conservative time integrations.

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "skewfd/dynamics.hpp"
#include "skewfd/stencil.hpp"
#include "skewfd/verify.hpp"

using json = nlohmann::json;
using namespace skewfd;

static Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(std::stoll(s));
    return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

static json stencil_to_json(const Stencil& st) {
    json j;
    j["p"] = st.p;
    j["m"] = st.m;
    j["lattice"] = kind_name(st.lat.kind);
    j["h"] = st.lat.h;
    json base = json::array();
    for (const auto& s : st.base) {
        json site = json::array();
        for (int v : s.l) site.push_back(v);
        base.push_back(site);
    }
    j["base"] = base;
    j["group_preset"] = st.group_name;
    json arrows = json::array();
    for (const auto& a : st.arrows) {
        json ja;
        json offs = json::array();
        for (const auto& o : a.offsets) {
            json oo = json::array();
            for (int v : o) oo.push_back(v);
            offs.push_back(oo);
        }
        ja["offsets"] = offs;
        ja["sign"] = a.coef > Rat(0) ? 1 : -1;
        ja["weight"] = to_string(a.coef > Rat(0) ? a.coef : -a.coef);
        std::string label;
        for (int k : a.slot_map) label.push_back((char)('a' + k));
        ja["label"] = label;
        arrows.push_back(ja);
    }
    j["arrows"] = arrows;
    j["scale"] = {{"coef", to_string(st.scale.coef)}, {"hpow", st.scale.hpow}};
    return j;
}

static Stencil stencil_from_json(const json& j) {
    Stencil st;
    st.p = j.at("p").get<int>();
    st.m = j.at("m").get<int>();
    if (st.m != 1) throw std::invalid_argument("stencil files support m = 1 only");
    std::string kind = j.at("lattice").get<std::string>();
    double h = j.at("h").get<double>();
    if (kind == "line1d") st.lat = Lattice::line1d(8, h);
    else if (kind == "square2d") st.lat = Lattice::square2d(8, h);
    else if (kind == "triangular2d") st.lat = Lattice::triangular2d(8, h);
    else if (kind == "cubic3d") st.lat = Lattice::cubic3d(8, h);
    else if (kind == "fcc3d") st.lat = Lattice::fcc3d(8, h);
    else throw std::invalid_argument("unknown lattice kind: " + kind);
    for (const auto& site : j.at("base")) {
        SiteIndex s;
        for (const auto& v : site) s.l.push_back(v.get<int>());
        st.base.push_back(s);
    }
    st.group_name = j.at("group_preset").get<std::string>();
    st.G = group_from_name(st.group_name == "combination" ? "translations" : st.group_name,
                           st.lat.d, 1);
    st.T = CouplingTensor::scalar(st.p + 1);
    for (const auto& ja : j.at("arrows")) {
        Arrow a;
        for (const auto& oo : ja.at("offsets")) {
            IVec o;
            for (const auto& v : oo) o.push_back(v.get<int>());
            a.offsets.push_back(o);
        }
        Rat w = parse_rat(ja.at("weight").get<std::string>());
        a.coef = ja.at("sign").get<int>() >= 0 ? w : -w;
        for (char ch : ja.at("label").get<std::string>()) a.slot_map.push_back(ch - 'a');
        if ((int)a.slot_map.size() != st.p + 1)
            throw std::invalid_argument("arrow label length must be p + 1");
        a.comp_inv = {0};
        st.arrows.push_back(a);
    }
    st.scale.coef = parse_rat(j.at("scale").at("coef").get<std::string>());
    st.scale.hpow = j.at("scale").at("hpow").get<int>();
    st.empty_warning = st.arrows.empty();
    return st;
}

static Lattice torus_for(const Stencil& st, int per_dim) {
    switch (st.lat.kind) {
        case LatticeKind::line1d: return Lattice::line1d(per_dim, st.lat.h);
        case LatticeKind::square2d: return Lattice::square2d(per_dim, st.lat.h);
        case LatticeKind::triangular2d: return Lattice::triangular2d(per_dim, st.lat.h);
        case LatticeKind::cubic3d: return Lattice::cubic3d(per_dim, st.lat.h);
        case LatticeKind::fcc3d: return Lattice::fcc3d(per_dim, st.lat.h);
    }
    throw std::logic_error("unreachable");
}

static MultiIndex parse_base(const std::string& spec, int dim) {
    MultiIndex base;
    std::stringstream ss(spec);
    std::string tok;
    if (dim == 1 && spec.find(';') == std::string::npos) {
        while (std::getline(ss, tok, ',')) base.push_back({{std::stoi(tok)}, 0});
        return base;
    }
    while (std::getline(ss, tok, ';')) {
        SiteIndex s;
        std::stringstream cs(tok);
        std::string c;
        while (std::getline(cs, c, ',')) s.l.push_back(std::stoi(c));
        if ((int)s.l.size() != dim) throw std::invalid_argument("base site has wrong dimension");
        base.push_back(s);
    }
    return base;
}

static int cmd_build(const std::string& preset, const std::string& base_spec,
                     const std::string& group, int dim, int m, double h,
                     const std::string& out) {
    Stencil st;
    if (!preset.empty()) {
        st = stencil_from_preset(preset, h);
    } else {
        if (m != 1) throw std::invalid_argument("build supports m = 1");
        auto base = parse_base(base_spec, dim);
        Lattice lat = dim == 1 ? Lattice::line1d(8, h)
                               : dim == 2 ? Lattice::square2d(8, h) : Lattice::cubic3d(8, h);
        st = build_stencil(lat, group_from_name(group, dim, m), base,
                           CouplingTensor::scalar((int)base.size()), group);
    }
    std::cout << render_diagram(st);
    if (st.empty_warning)
        std::cout << "warning: every arrow cancelled; the stencil is identically zero\n";
    std::cout << "terms: " << st.term_count() << "\n";
    if (!out.empty()) {
        std::ofstream f(out);
        f << stencil_to_json(st).dump(2) << "\n";
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

struct Target {
    std::vector<DerivOperator> basis;
    bool single;  // run a refinement study against the fitted leading operator
};

static Target target_from_name(const std::string& name, int d) {
    if (name == "dx") return {{op_dx(d)}, true};
    if (name == "dxxx") return {{op_dxxx()}, true};
    if (name == "jacobian") return {{op_jacobian2d()}, true};
    if (name == "jacobian-basis") return {{op_pair_vpww(), op_pair_vwww()}, false};
    if (name == "cyclic3") return {{op_cyclic_jacobian3()}, true};
    if (name == "det3") return {{op_det_grad3()}, true};
    throw std::invalid_argument("unknown target: " + name);
}

static int cmd_verify(const std::string& preset, const std::string& target_name, double h,
                      int levels, unsigned seed, const std::string& out) {
    Stencil st;
    if (preset.size() > 5 && preset.substr(preset.size() - 5) == ".json") {
        std::ifstream f(preset);
        if (!f) throw std::invalid_argument("cannot open " + preset);
        st = stencil_from_json(json::parse(f));
    } else {
        st = stencil_from_preset(preset, h);
    }

    // conservation gate: materialize on a small torus and contract
    try {
        auto grid = torus_for(st, 8);
        auto K = to_tensor(st, grid);
        std::mt19937 rng(seed);
        std::uniform_int_distribution<int> num(-9, 9);
        std::vector<std::vector<Rat>> grads(st.p, std::vector<Rat>((size_t)grid.box_size()));
        for (auto& g : grads)
            for (auto& v : g) v = Rat(num(rng));
        if (conservation_residual(K, grads) != Rat(0)) {
            std::cerr << "verify: nonzero conservation residual\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "verify: skew-symmetry violation: " << e.what() << "\n";
        return 1;
    }

    auto target = target_from_name(target_name, st.lat.d);
    auto fit = fit_leading_operator(st, target.basis);
    bool pass = fit.exact && fit.float_agreement <= 1e-6;

    json summary;
    summary["hpower"] = fit.hpower;
    summary["coefficients"] = fit.coeffs;
    summary["exact"] = fit.exact;
    summary["float_agreement"] = fit.float_agreement;

    std::ostringstream csv;
    csv << "h,error\n";
    if (target.single) {
        auto tuples = test_tuples(st.lat.d, st.p, 3, seed);
        std::vector<DVec> points = {DVec(st.lat.d, 0.0), DVec(st.lat.d, 0.31)};
        std::vector<double> hs, errs;
        for (int lev = 0; lev < levels; ++lev) {
            double hh = 0.1 / std::pow(2.0, lev);
            double err = 0;
            for (const auto& tuple : tuples) {
                std::vector<std::function<double(const DVec&)>> fns;
                for (const auto& fn : tuple)
                    fns.push_back([&fn](const DVec& x) { return fn(x); });
                for (const auto& x0 : points) {
                    double raw = evaluate_smooth(st, fns, x0, hh, false) /
                                 std::pow(hh, fit.hpower);
                    double ref = fit.coeffs[0] * apply_operator(target.basis[0], tuple, x0);
                    err = std::max(err, std::abs(raw - ref));
                }
            }
            hs.push_back(hh);
            errs.push_back(err);
            char row[64];
            std::snprintf(row, sizeof row, "%.17g,%.17g\n", hh, err);
            csv << row;
        }
        auto study = fit_slope(hs, errs, 1e-3);
        summary["slope"] = study.slope;
        summary["residual"] = study.residual;
        bool order_ok = study.consistent &&
                        std::abs(study.slope - std::round(study.slope)) <= 0.1 &&
                        std::round(study.slope) >= 1;
        pass = pass && order_ok;
    }
    summary["pass"] = pass;

    if (!out.empty()) {
        std::ofstream f(out);
        f << csv.str();
        std::ofstream js(out + ".json");
        js << summary.dump(2) << "\n";
    }
    std::cout << summary.dump(2) << "\n";
    return pass ? 0 : 1;
}

static std::vector<double> seeded_vorticity(int n, double h, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::vector<double> q((size_t)n * n, 0.0);
    for (int kx = 0; kx <= 2; ++kx)
        for (int ky = 0; ky <= 2; ++ky) {
            if (kx == 0 && ky == 0) continue;
            double ac = amp(rng), as = amp(rng);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double phase = kx * i * h + ky * j * h;
                    q[(size_t)i * n + j] += ac * std::cos(phase) + as * std::sin(phase);
                }
        }
    double mean = 0;
    for (double v : q) mean += v;
    mean /= (double)q.size();
    for (double& v : q) v -= mean;
    return q;
}

static int cmd_simulate(const std::string& preset, int n, double dt, int steps,
                        const std::string& method_name, unsigned seed,
                        const std::string& out) {
    ConservativeSystem sys;
    std::vector<double> u0;
    if (preset == "euler2d") {
        double h = 2 * 3.141592653589793 / n;
        sys = euler2d_system(n, h);
        u0 = seeded_vorticity(n, h, seed);
    } else if (preset == "ode1d") {
        sys.lat = Lattice::line1d(n);
        sys.K = to_tensor(preset_p2d1(1.0), sys.lat);
        sys.integrals.push_back(quadratic_half_sum(1.0, "half-sum-sq"));
        sys.integrals.push_back(cubic_third_sum(1.0, "third-sum-cube"));
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        u0.resize((size_t)n);
        for (auto& v : u0) v = dist(rng);
    } else {
        throw std::invalid_argument("unknown simulation preset: " + preset);
    }

    std::ostringstream csv;
    csv << "t";
    for (const auto& I : sys.integrals) csv << "," << I.name;
    csv << ",conservation_residual\n";

    auto method = method_from_name(method_name);
    std::vector<double> u = u0;
    std::vector<std::vector<double>> drift_ref;
    int done = 0, rc = 0;
    std::string error;
    auto emit = [&](double t) {
        std::vector<std::vector<double>> grads;
        for (const auto& I : sys.integrals) grads.push_back(I.grad(u));
        auto F = contract<double>(sys.K, grads);
        double res = 0;
        for (const auto& g : grads) {
            double dot = 0;
            for (size_t i = 0; i < F.size(); ++i) dot += F[i] * g[i];
            res = std::max(res, std::abs(dot * sys.scale));
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", t);
        csv << buf;
        std::vector<double> vals;
        for (const auto& I : sys.integrals) {
            vals.push_back(I.eval(u));
            std::snprintf(buf, sizeof buf, ",%.17g", vals.back());
            csv << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", res);
        csv << buf;
        drift_ref.push_back(vals);
    };
    if (steps > 0) {
        gradient_self_check(sys, u0);
        emit(0.0);
        try {
            for (done = 1; done <= steps; ++done) {
                u = method == Method::midpoint ? step_midpoint(sys, u, dt) : step_rk4(sys, u, dt);
                emit(done * dt);
            }
            done = steps;
        } catch (const std::exception& e) {
            error = e.what();
            rc = 3;
            --done;
        }
    }

    json summary;
    summary["preset"] = preset;
    summary["n"] = n;
    summary["dt"] = dt;
    summary["steps_completed"] = steps > 0 ? done : 0;
    summary["method"] = method_name;
    summary["seed"] = seed;
    if (!error.empty()) summary["error"] = error;
    if (!drift_ref.empty()) {
        json drifts = json::object();
        for (size_t j = 0; j < sys.integrals.size(); ++j) {
            double ref = drift_ref[0][j], worst = 0;
            for (const auto& vals : drift_ref)
                worst = std::max(worst, std::abs(vals[j] - ref));
            drifts[sys.integrals[j].name] = worst / std::max(std::abs(ref), 1e-300);
        }
        summary["max_relative_drift"] = drifts;
    }

    std::string csv_path = out.empty() ? "trajectory.csv" : out;
    std::ofstream f(csv_path);
    f << csv.str();
    std::ofstream js(csv_path + ".summary.json");
    js << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";
    return rc;
}

int main(int argc, char** argv) {
    CLI::App app{"completely antisymmetric finite-difference stencils: "
                 "construction, verification, conservative integration"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // leave --h free for grid spacing

    std::string preset, base_spec, group = "translations", method = "midpoint", target = "dx";
    std::string out;
    int dim = 1, m = 1, levels = 5, n = 32, steps = 100;
    double h = 1.0, dt = 0.01;
    unsigned seed = 0;

    auto* build = app.add_subcommand("build", "symmetrize a base multi-index or preset");
    build->add_option("--preset", preset, "stencil preset name");
    build->add_option("--base", base_spec, "base sites, e.g. 0,1 (1D) or 0,0;1,0 (2D)");
    build->add_option("--group", group, "symmetry group preset");
    build->add_option("--dim", dim, "spatial dimension");
    build->add_option("--m", m, "components per site");
    build->add_option("--h", h, "grid spacing");
    build->add_option("--out", out, "stencil JSON output path");

    auto* verify = app.add_subcommand("verify", "order and conservation checks");
    verify->add_option("--preset", preset, "preset name or stencil JSON path")->required();
    verify->add_option("--target", target, "dx|dxxx|jacobian|jacobian-basis|cyclic3|det3");
    verify->add_option("--h", h, "grid spacing");
    verify->add_option("--levels", levels, "refinement levels");
    verify->add_option("--seed", seed, "rng seed");
    verify->add_option("--out", out, "study CSV path (summary JSON alongside)");

    auto* simulate = app.add_subcommand("simulate", "conservative time integration");
    simulate->add_option("--preset", preset, "euler2d|ode1d")->required();
    simulate->add_option("--n", n, "grid size per dimension");
    simulate->add_option("--dt", dt, "time step");
    simulate->add_option("--steps", steps, "number of steps");
    simulate->add_option("--method", method, "midpoint|rk4");
    simulate->add_option("--seed", seed, "rng seed");
    simulate->add_option("--out", out, "trajectory CSV path");

    CLI11_PARSE(app, argc, argv);
    try {
        if (build->parsed()) return cmd_build(preset, base_spec, group, dim, m, h, out);
        if (verify->parsed()) return cmd_verify(preset, target, h, levels, seed, out);
        return cmd_simulate(preset, n, dt, steps, method, seed, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
