#include "doctest.h"

#include "irrmap/mapdeg.hpp"

#include <cstdlib>

using namespace irrmap;

namespace {

RationalMapEval make_map(int d, std::uint64_t seed) {
    rng r(seed);
    auto s = PolarizedAbelianSurface::make(d, random_siegel(r));
    auto basis = even_basis(s);
    const auto profile = make_profile(d);
    const auto cond = condition_matrix(basis, profile);
    auto sub = solve_subsystem(cond, profile);
    return RationalMapEval(std::move(basis), std::move(sub));
}

double pdist_oracle(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return 1.0 - std::abs(a.dot(b)) / (a.norm() * b.norm());
}

Vec4 negate_coords(const Vec4& t) {
    Vec4 out;
    for (int i = 0; i < 4; ++i) {
        double w = -t(i);
        w -= std::floor(w);
        out(i) = w;
    }
    return out;
}

bool contains_point(const std::vector<Vec4>& set, const Vec4& t,
                    double tol = 1e-6) {
    for (const auto& s : set)
        if (torus_dist(s, t) < tol) return true;
    return false;
}

} // namespace

TEST_CASE("torus_dist wraps the max metric") {
    Vec4 a, b;
    a << 0.02, 0.5, 0.99, 0.25;
    b << 0.98, 0.5, 0.01, 0.25;
    CHECK(torus_dist(a, b) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(torus_dist(a, a) == 0.0);
}

TEST_CASE("evaluation respects the involution and the period lattice") {
    for (int d : {1, 2}) {
        const auto m = make_map(d, 101 + d);
        const auto& s = m.surface();
        rng r(55);
        for (int trial = 0; trial < 6; ++trial) {
            Vec4 t;
            t << r.uniform(), r.uniform(), r.uniform(), r.uniform();
            const Vec2c z = s.from_torus(t);
            const auto v = m.eval(z);
            REQUIRE(v.has_value());

            const auto vneg = m.eval(Vec2c(-z));
            REQUIRE(vneg.has_value());
            CHECK(pdist_oracle(*v, *vneg) < 1e-9);

            const Vec2c shifted = z + s.omega() * Vec2(1, 0).cast<cdouble>() +
                                  Vec2c(0.0, static_cast<double>(d));
            const auto vsh = m.eval(shifted);
            REQUIRE(vsh.has_value());
            CHECK(pdist_oracle(*v, *vsh) < 1e-9);
        }
    }
}

TEST_CASE("base points of the subsystem are flagged indeterminate") {
    const auto m = make_map(3, 17); // profile (2,0,...): one node at the origin
    REQUIRE(m.base_points().size() == 1);
    const auto pts = m.surface().two_torsion();
    CHECK(m.near_base_point(pts[0].z));
    CHECK_FALSE(m.eval(pts[0].z).has_value());
    CHECK_FALSE(m.near_base_point(pts[1].z));

    Vec4 t;
    t << 0.21, 0.37, 0.66, 0.12;
    CHECK(m.eval(m.surface().from_torus(t)).has_value());
}

TEST_CASE("jacobian rank is 2 at generic points, symmetric under negation") {
    const auto m = make_map(1, 23);
    rng r(91);
    for (int trial = 0; trial < 10; ++trial) {
        Vec4 t;
        t << r.uniform(), r.uniform(), r.uniform(), r.uniform();
        const Vec2c z = m.surface().from_torus(t);
        if (!m.eval(z)) continue;
        const int rk = m.jacobian_rank(z);
        CHECK(rk == 2);
        CHECK(m.jacobian_rank(Vec2c(-z)) == rk);
    }
}

// independent check: for a generic (1,1) surface the even sections of twice the
// principal polarization map 2:1 onto the classical Kummer quartic in P^3:
// fiber {z0, -z0}, slice total 2 * 4 = 8 in 4 proportionality classes.
TEST_CASE("fiber through a generic point of a Kummer surface") {
    const auto m = make_map(1, 7);
    Vec4 t0;
    t0 << 0.137, 0.411, 0.703, 0.269;
    const Vec2c z0 = m.surface().from_torus(t0);

    const auto rep = fiber(m, z0, 12, 1e-10, 424242);
    CHECK(rep.count == 2);
    CHECK(rep.total == 8);
    CHECK(rep.classes == 4);
    CHECK(rep.max_residual < 1e-10);
    REQUIRE(rep.solutions.size() == 2);
    CHECK(contains_point(rep.solutions, m.surface().torus_coords(z0)));
    CHECK(contains_point(rep.solutions, m.surface().torus_coords(Vec2c(-z0))));
    for (double res : rep.residuals) CHECK(res < 1e-10);
}

TEST_CASE("fiber counts agree across grids and annihilator draws") {
    const auto m = make_map(1, 7);
    Vec4 t0;
    t0 << 0.62, 0.18, 0.335, 0.86;
    const Vec2c z0 = m.surface().from_torus(t0);

    const auto a = fiber(m, z0, 10, 1e-10, 1);
    const auto b = fiber(m, z0, 14, 1e-10, 999);
    CHECK(a.count == b.count);
    CHECK(a.total == b.total);
    CHECK(a.classes == b.classes);
    CHECK(a.count == 2);
    CHECK(a.total == 8);
}

TEST_CASE("fibers are invariant under lattice translation of the target") {
    const auto m = make_map(1, 31);
    const auto& s = m.surface();
    Vec4 t0;
    t0 << 0.41, 0.77, 0.09, 0.53;
    const Vec2c z0 = s.from_torus(t0);
    const Vec2c z1 = z0 + s.omega() * Vec2(0, 1).cast<cdouble>() + Vec2c(1.0, 0.0);

    const auto a = fiber(m, z0, 10, 1e-10, 5);
    const auto b = fiber(m, z1, 10, 1e-10, 5);
    REQUIRE(a.count == b.count);
    CHECK(a.total == b.total);
    for (int i = 0; i < a.count; ++i)
        CHECK(torus_dist(a.solutions[i], b.solutions[i]) < 1e-8);
}

TEST_CASE("fiber of a non-principal surface is negation-closed and even") {
    const auto m = make_map(2, 13);
    Vec4 t0;
    t0 << 0.23, 0.58, 0.81, 0.145;
    const Vec2c z0 = m.surface().from_torus(t0);

    const auto rep = fiber(m, z0, 12, 1e-10, 77);
    CHECK(rep.count >= 2);
    CHECK(rep.count % 2 == 0);
    CHECK(rep.total <= 8);
    CHECK(rep.total % rep.count == 0);
    CHECK(rep.count * rep.classes == rep.total);
    for (const auto& sol : rep.solutions)
        CHECK(contains_point(rep.solutions, negate_coords(sol)));
}

TEST_CASE("degree estimation identifies the 2:1 Kummer map") {
    const auto m = make_map(1, 7);
    const auto est = estimate_degrees(m, 5, 2024, 10);
    CHECK(est.deg_phi == 2);
    CHECK(est.deg_S == 4);
    CHECK(est.product == 8);
    CHECK(est.stability == 1.0);
    CHECK(est.max_residual < 1e-10);
    CHECK(est.n_trials == 5);
    CHECK(est.grid == 10);

    // byte-for-byte determinism for a fixed seed
    const auto again = estimate_degrees(m, 5, 2024, 10);
    CHECK(again.deg_phi == est.deg_phi);
    CHECK(again.deg_S == est.deg_S);
    CHECK(again.stability == est.stability);
    CHECK(again.max_residual == est.max_residual);
}

TEST_CASE("degree estimation rejects too few trials") {
    const auto m = make_map(1, 7);
    CHECK_THROWS_AS(estimate_degrees(m, 3, 1, 8), error);
    try {
        estimate_degrees(m, 3, 1, 8);
    } catch (const error& e) {
        CHECK(e.code() == errc::invalid_config);
    }
}

TEST_CASE("slice solver reports failure when nothing converges") {
    const auto m = make_map(1, 7);
    detail::SliceProblem p;
    p.theta = &m.basis().full();
    p.r1 = Eigen::RowVectorXcd::Zero(m.basis().size());
    p.r2 = Eigen::RowVectorXcd::Zero(m.basis().size());
    p.proj_rows = m.comb();
    p.full_rows = m.comb();
    p.tol = m.tolerances();
    CHECK_THROWS_AS(detail::solve_slice(p, 4, {}), error);
    try {
        detail::solve_slice(p, 4, {});
    } catch (const error& e) {
        CHECK(e.code() == errc::fiber_search_failed);
        CHECK(errc_is_numerical(e.code()));
    }
    CHECK_THROWS_AS(detail::solve_slice(p, 1, {}), error);
}

TEST_CASE("solution sets are independent of the thread count") {
    const auto m = make_map(1, 7);
    Vec4 t0;
    t0 << 0.91, 0.32, 0.57, 0.11;
    const Vec2c z0 = m.surface().from_torus(t0);

    const char* saved = std::getenv("IRRMAP_THREADS");
    setenv("IRRMAP_THREADS", "1", 1);
    const auto a = fiber(m, z0, 8, 1e-10, 3);
    setenv("IRRMAP_THREADS", "3", 1);
    const auto b = fiber(m, z0, 8, 1e-10, 3);
    if (saved)
        setenv("IRRMAP_THREADS", saved, 1);
    else
        unsetenv("IRRMAP_THREADS");

    REQUIRE(a.count == b.count);
    CHECK(a.total == b.total);
    CHECK(a.classes == b.classes);
    for (int i = 0; i < a.count; ++i) {
        CHECK(a.solutions[i] == b.solutions[i]); // bitwise: same representatives
        CHECK(a.residuals[i] == b.residuals[i]);
    }
}
