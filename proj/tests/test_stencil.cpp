#include <doctest.h>

#include <cmath>
#include <random>

#include "skewfd/stencil.hpp"

using namespace skewfd;

namespace {
MultiIndex mi1(std::initializer_list<int> ls) {
    MultiIndex mi;
    for (int l : ls) mi.push_back({{l}, 0});
    return mi;
}

Rat arrow_at(const Stencil& st, const std::vector<IVec>& offsets) {
    for (const auto& a : st.arrows)
        if (a.offsets == offsets) return a.coef;
    return Rat(0);
}
} // namespace

TEST_CASE("central difference arrows") {
    auto st = preset_central();
    REQUIRE(st.arrows.size() == 2);
    CHECK(arrow_at(st, {{1}}) == Rat(1));
    CHECK(arrow_at(st, {{-1}}) == Rat(-1));

    std::vector<Rat> v = {Rat(4), Rat(9), Rat(-2), Rat(7), Rat(0), Rat(3), Rat(1), Rat(8)};
    auto grid = Lattice::line1d(8, 1.0);
    CHECK(evaluate<Rat>(st, {v}, grid, {0}) == v[1] - v[7]);
}

TEST_CASE("repeated base sites cancel to an empty stencil") {
    auto st = build_stencil(Lattice::line1d(8, 1.0), group_translations(1), mi1({0, 0}),
                            CouplingTensor::scalar(2), "translations");
    CHECK(st.empty_warning);
    CHECK(st.arrows.empty());
}

TEST_CASE("three-point 1D stencil matches its determinant formula") {
    auto st = preset_p2d1();
    REQUIRE(st.arrows.size() == 3);
    CHECK(arrow_at(st, {{-2}, {-1}}) == Rat(1));
    CHECK(arrow_at(st, {{-1}, {1}}) == Rat(-1));
    CHECK(arrow_at(st, {{1}, {2}}) == Rat(1));

    // v = x, w = x^2 at the origin with h = 1 gives 2 + 2 + 2
    auto v = [](const DVec& x) { return x[0]; };
    auto w = [](const DVec& x) { return x[0] * x[0]; };
    CHECK(evaluate_smooth(st, {v, w}, {0.0}, 1.0, false) == doctest::Approx(6.0));
}

TEST_CASE("square-grid Jacobian, translations only") {
    auto st = preset_fig3b();
    REQUIRE(st.arrows.size() == 3);
    CHECK(arrow_at(st, {{-1, 0}, {-1, 1}}) == Rat(-1));
    CHECK(arrow_at(st, {{0, -1}, {1, -1}}) == Rat(1));
    CHECK(arrow_at(st, {{0, 1}, {1, 0}}) == Rat(-1));
}

TEST_CASE("adding the inversion doubles the arrows") {
    auto st = preset_fig3c();
    CHECK(st.arrows.size() == 6);
    CHECK(st.term_count() == 12);
}

TEST_CASE("full square symmetrization gives the 24-term stencil") {
    auto st = arakawa();
    CHECK(st.arrows.size() == 12);
    CHECK(st.term_count() == 24);
    for (const auto& a : st.arrows) CHECK((a.coef == Rat(1) || a.coef == Rat(-1)));

    auto K = to_tensor(st, Lattice::square2d(8, 1.0));
    CHECK(is_g_invariant(K, group_d4()).pass);
    CHECK(bandwidth(K, Metric::graph) == doctest::Approx(2.0));
    CHECK(bandwidth(K, Metric::euclidean) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("triangular symmetrization keeps bandwidth 1") {
    auto st = arakawa_triangular();
    CHECK(st.arrows.size() == 6);
    CHECK(st.scale.coef == Rat(3));

    auto K = to_tensor(st, Lattice::triangular2d(8, 1.0));
    CHECK(bandwidth(K, Metric::graph) == doctest::Approx(1.0));
    CHECK(is_g_invariant(K, group_d3_tri()).pass);
}

TEST_CASE("the p=3 square tensor matches its drawing and is D4-invariant") {
    auto st = square_p3();
    CHECK(st.arrows.size() == 4);

    auto grid = Lattice::square2d(8, 1.0);
    auto K = to_tensor(st, grid);
    auto code = [&](int a, int b) { return grid.site_code({a, b}); };
    // the four cyclic arrows of the drawing, all +1
    CHECK(K.at({code(0, 0), code(1, 0), code(1, 1), code(0, 1)}) == Rat(1));
    CHECK(K.at({code(0, 0), code(0, 1), code(-1, 1), code(-1, 0)}) == Rat(1));
    CHECK(K.at({code(0, 0), code(-1, 0), code(-1, -1), code(0, -1)}) == Rat(1));
    CHECK(K.at({code(0, 0), code(0, -1), code(1, -1), code(1, 0)}) == Rat(1));

    // invariant under the point group alone, and under the full group once the
    // translations carry the checkerboard character
    auto Gpoint = group_d4();
    Gpoint.translations = false;
    CHECK(is_g_invariant(K, Gpoint).pass);
    auto Gfull = group_d4();
    Gfull.translation_parity = {1, 1};
    CHECK(is_g_invariant(K, Gfull).pass);
}

TEST_CASE("tetrahedral 3D Jacobians") {
    auto fcc = fcc_jacobian3d();
    CHECK(fcc.arrows.size() == 8);
    auto cubic = cubic_jacobian3d();
    CHECK(cubic.arrows.size() == 32);
    CHECK(cubic.scale.coef == Rat(6));
}

TEST_CASE("stencil group closure: acting on the arrow set reproduces it") {
    auto st = arakawa();
    auto grid = Lattice::square2d(8, 1.0);
    auto K = to_tensor(st, grid);
    for (const auto& g : group_d4().point_ops) {
        for (const auto& [key, val] : K.entries) {
            Key mapped;
            for (long code : key) {
                IVec l = grid.site_from_code(code);
                mapped.push_back(grid.site_code(grid.wrap(g.apply_l(l))));
            }
            CHECK(K.at(mapped) == (g.sign > 0 ? val : -val));
        }
    }
}

TEST_CASE("repeated arguments annihilate") {
    auto st = arakawa();
    auto grid = Lattice::square2d(8, 1.0);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> d(-5, 5);
    std::vector<Rat> v(64);
    for (auto& x : v) x = Rat(d(rng));
    for (const auto& site : grid.all_sites()) CHECK(evaluate<Rat>(st, {v, v}, grid, site) == Rat(0));
}

TEST_CASE("m>1 labels follow the paper's two-component diagram") {
    // base ((0,a),(0,b),(1,c)) with a rank-3 coupling skew in its first two slots
    MultiIndex base = {{{0}, 0}, {{0}, 1}, {{1}, 2}};
    CouplingTensor T;
    T.m = 3;
    T.rank = 3;
    T.entries.assign(27, Rat(0));
    T.set({0, 1, 2}, Rat(1));
    T.set({1, 0, 2}, Rat(-1));
    auto st = build_stencil(Lattice::line1d(8, 1.0), group_translations(1), base, T, "translations");
    REQUIRE(st.arrows.size() == 2);
    for (const auto& a : st.arrows) {
        if (a.offsets == std::vector<IVec>{{0}, {1}}) {
            CHECK(a.coef == Rat(2));  // two zeros in the base
            CHECK(a.slot_map == std::vector<int>{0, 1, 2});
        } else {
            CHECK(a.offsets == std::vector<IVec>{{-1}, {-1}});
            CHECK(a.coef == Rat(1));
            CHECK(a.slot_map == std::vector<int>{1, 2, 0});
        }
    }
    auto text = render_diagram(st);
    CHECK(text.find("{abc}") != std::string::npos);
    CHECK(text.find("{bca}") != std::string::npos);
}

TEST_CASE("two-component bandwidth-1 difference reproduces the transpose pattern") {
    // base ((0,a),(1,b)) with general coupling T: F = T v_1 - T^t v_{-1}
    MultiIndex base = {{{0}, 0}, {{1}, 1}};
    CouplingTensor T;
    T.m = 2;
    T.rank = 2;
    T.entries = {Rat(2), Rat(3), Rat(5), Rat(7)};  // T = [[2,3],[5,7]]
    auto st = build_stencil(Lattice::line1d(8, 1.0), group_translations(1), base, T, "translations");
    REQUIRE(st.arrows.size() == 2);

    auto grid = Lattice::line1d(8, 1.0);
    std::vector<double> v(16, 0.0);
    v[grid.site_code({1}, 0, 2)] = 1.0;  // v_1 = e_a
    CHECK(evaluate_component(st, {v}, grid, {0}, 0) == doctest::Approx(2.0));
    CHECK(evaluate_component(st, {v}, grid, {0}, 1) == doctest::Approx(5.0));
    std::vector<double> w(16, 0.0);
    w[grid.site_code({-1}, 1, 2)] = 1.0;  // v_{-1} = e_b
    CHECK(evaluate_component(st, {w}, grid, {0}, 0) == doctest::Approx(-5.0));
    CHECK(evaluate_component(st, {w}, grid, {0}, 1) == doctest::Approx(-7.0));
}

TEST_CASE("linear combinations merge arrows rationally") {
    auto f01 = preset_central();
    f01.scale = {Rat(1), 0};
    auto f02 = preset_central(1.0, 2);
    f02.scale = {Rat(1), 0};
    auto richardson = linear_combination({{Rat(8), f01}, {Rat(-1), f02}});
    CHECK(arrow_at(richardson, {{1}}) == Rat(8));
    CHECK(arrow_at(richardson, {{-2}}) == Rat(1));
}

TEST_CASE("nonlocal ring tensor is skew and recovers the central difference") {
    auto J = appendix_tensor(8);
    CHECK(is_skew(J).pass);
    CHECK(bandwidth(J, Metric::graph) > 1.0);

    std::vector<Rat> ones(8, Rat(1));
    auto K = contract_partial(J, ones);
    auto central = to_tensor(preset_central(), Lattice::line1d(8, 1.0));
    CHECK(K.entries == central.entries);

    // contraction with a repeated argument vanishes
    std::vector<Rat> v(8);
    for (int i = 0; i < 8; ++i) v[i] = Rat(2 * i - 5);
    auto F = contract<Rat>(J, {v, v});
    for (const auto& f : F) CHECK(f == Rat(0));
}

TEST_CASE("diagram rendering is deterministic") {
    auto st = preset_central();
    CHECK(render_diagram(st) == render_diagram(preset_central()));
    CHECK(render_diagram(st).find("(+1) (1)") != std::string::npos);
    CHECK(render_diagram(st).find("(-1) (-1)") != std::string::npos);
}
