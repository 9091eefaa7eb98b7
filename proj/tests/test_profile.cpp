#include "doctest.h"

#include "irrmap/profile.hpp"

using namespace irrmap;

namespace {

// independent brute-force oracle: lexicographically largest descending tuple.
std::array<int, 4> four_squares_oracle(int n) {
    for (int a = 70; a >= 0; --a)
        for (int b = a; b >= 0; --b)
            for (int c = b; c >= 0; --c)
                for (int e = c; e >= 0; --e)
                    if (a * a + b * b + c * c + e * e == n) return {a, b, c, e};
    return {-1, -1, -1, -1};
}

} // namespace

TEST_CASE("four_squares matches the brute-force oracle") {
    CHECK(four_squares(0) == std::array<int, 4>{0, 0, 0, 0});
    CHECK(four_squares(4) == std::array<int, 4>{2, 0, 0, 0});
    CHECK(four_squares(6) == std::array<int, 4>{2, 1, 1, 0});
    CHECK(four_squares(14) == std::array<int, 4>{3, 2, 1, 0});

    for (int n = 0; n <= 600; ++n) {
        const auto got = four_squares(n);
        CHECK(got == four_squares_oracle(n));
        CHECK(got[0] * got[0] + got[1] * got[1] + got[2] * got[2] +
                  got[3] * got[3] ==
              n);
        CHECK(got[0] >= got[1]);
        CHECK(got[1] >= got[2]);
        CHECK(got[2] >= got[3]);
        CHECK(four_squares(n) == got); // deterministic
    }
    CHECK_THROWS_AS(four_squares(-1), error);
}

TEST_CASE("default profile satisfies the weight identities") {
    // sum a_i^2 = 2d - 2 with a_15 = a_16 = 0
    for (int d = 1; d <= 50; ++d) {
        const auto p = make_profile(d);
        CHECK(p.sum_squares() == 2 * d - 2);
        CHECK(p.a[14] == 0);
        CHECK(p.a[15] == 0);
        for (int i = 4; i < 16; ++i) CHECK(p.a[i] == 0);
        CHECK(p.valid_for(d));
    }
    CHECK(make_profile(1).sum_squares() == 0);
    CHECK(make_profile(3).a == std::array<int, 16>{2, 0, 0, 0});
}

TEST_CASE("profile parsing") {
    const auto p = parse_profile("2,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0");
    CHECK(p.a[0] == 2);
    CHECK(p.a[1] == 1);
    CHECK(p.sum_squares() == 5);
    CHECK_THROWS_AS(parse_profile("1,2,3"), error);
    CHECK_THROWS_AS(parse_profile("2,1,0,0,0,0,0,0,0,0,0,0,0,0,0,-1"), error);
    CHECK_THROWS_AS(parse_profile("2,x,0,0,0,0,0,0,0,0,0,0,0,0,0,0"), error);
}

TEST_CASE("condition matrix row count equals sum of squares") {
    rng r(41);
    auto s = PolarizedAbelianSurface::make(2, random_siegel(r));
    EvenBasis basis = even_basis(s);

    // all-zero profile: no conditions
    MultiplicityProfile zero;
    CHECK(condition_matrix(basis, zero).row_count() == 0);

    // single point with a_i = 2: degrees 0 and 2 give 1 + 3 = 4 rows
    MultiplicityProfile two;
    two.a[0] = 2;
    CHECK(condition_matrix(basis, two).row_count() == 4);

    // random profiles with sum of squares <= 60
    for (int trial = 0; trial < 5; ++trial) {
        MultiplicityProfile p;
        int budget = 60;
        for (int i = 0; i < 16 && budget > 0; ++i) {
            const int v = static_cast<int>(r.below(4));
            if (v * v <= budget) {
                p.a[i] = v;
                budget -= v * v;
            }
        }
        CHECK(condition_matrix(basis, p).row_count() == p.sum_squares());
    }
}

TEST_CASE("subsystem for the empty condition set is the full even space") {
    rng r(42);
    auto s = PolarizedAbelianSurface::make(1, random_siegel(r));
    EvenBasis basis = even_basis(s);
    const auto profile = make_profile(1);
    const auto sub =
        solve_subsystem(condition_matrix(basis, profile), profile);
    CHECK(sub.dim() == 4);
    CHECK(sub.N == 3);
    CHECK(sub.residual == 0.0);
}

TEST_CASE("generic subsystems have dimension 4 and meet their conditions") {
    rng r(43);
    for (int d : {3, 5}) {
        auto s = PolarizedAbelianSurface::make(d, random_siegel(r));
        EvenBasis basis = even_basis(s);
        const auto profile = make_profile(d);
        const auto cond = condition_matrix(basis, profile);
        CHECK(cond.row_count() == 2 * d - 2);
        const auto sub = solve_subsystem(cond, profile);
        CHECK(sub.dim() >= 4); // dim V >= 2d+2 - sum a_i^2 = 4
        CHECK(sub.residual < 1e-7);
        CHECK(sub.rank_gap >= 1e6);

        // orthonormal coefficient rows
        const Eigen::MatrixXcd gram =
            sub.coeffs * sub.coeffs.adjoint() -
            Eigen::MatrixXcd::Identity(sub.dim(), sub.dim());
        CHECK(gram.cwiseAbs().maxCoeff() < 1e-12);

        // every section of V vanishes to order >= 2 a_i: check all Taylor
        // coefficients below degree 2 a_i, and record sharpness at 2 a_i.
        const auto pts = s.two_torsion();
        for (int i = 0; i < 16; ++i) {
            if (profile.a[i] == 0) continue;
            const int cut = 2 * profile.a[i];
            const TaylorTable t = basis.eval_taylor(pts[i], cut);
            double below = 0.0, at = 0.0, scale = 0.0;
            for (int g = 0; g < basis.size(); ++g)
                for (int b1 = 0; b1 <= cut; ++b1)
                    for (int b2 = 0; b1 + b2 <= cut; ++b2)
                        scale = std::max(scale, std::abs(t.coeff(g, b1, b2)));
            for (int row = 0; row < sub.dim(); ++row)
                for (int b1 = 0; b1 <= cut; ++b1)
                    for (int b2 = 0; b1 + b2 <= cut; ++b2) {
                        cdouble acc(0, 0);
                        for (int g = 0; g < basis.size(); ++g)
                            acc += sub.coeffs(row, g) * t.coeff(g, b1, b2);
                        const double mag = std::abs(acc) / scale;
                        if (b1 + b2 < cut)
                            below = std::max(below, mag);
                        else
                            at = std::max(at, mag);
                    }
            CHECK(below < 1e-7);
            CHECK(at > 1e-4); // generic sharpness at degree 2 a_i
        }
    }
}

TEST_CASE("overdetermined conditions raise SubsystemTooSmall") {
    rng r(44);
    auto s = PolarizedAbelianSurface::make(1, random_siegel(r));
    EvenBasis basis = even_basis(s);
    MultiplicityProfile p;
    p.a[0] = 2;
    p.a[1] = 1; // 5 independent conditions on a 4-dimensional space
    const auto cond = condition_matrix(basis, p);
    CHECK(cond.row_count() == 5);
    try {
        solve_subsystem(cond, p);
        FAIL("expected subsystem_too_small");
    } catch (const error& e) {
        CHECK(e.code() == errc::subsystem_too_small);
    }
}

TEST_CASE("ambiguous singular spectra raise RankAmbiguous") {
    ConditionMatrix cond;
    cond.rows = Eigen::MatrixXcd::Zero(3, 8);
    cond.rows(0, 0) = 1.0;
    cond.rows(1, 1) = 1e-7;  // kept: above rank_tol x smax
    cond.rows(2, 2) = 1e-9;  // discarded, but only 100x below the kept one
    MultiplicityProfile p;
    try {
        solve_subsystem(cond, p, 1e-8);
        FAIL("expected rank_ambiguous");
    } catch (const error& e) {
        CHECK(e.code() == errc::rank_ambiguous);
        CHECK(errc_is_numerical(e.code()));
    }
}
