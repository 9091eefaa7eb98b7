#include "irrmap/profile.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace irrmap {

std::array<int, 4> four_squares(int n) {
    if (n < 0) fail(errc::invalid_config, "four_squares of a negative number");
    const int top = static_cast<int>(std::sqrt(static_cast<double>(n))) + 1;
    for (int a = top; a >= 0; --a) {
        const int ra = n - a * a;
        if (ra < 0) continue;
        for (int b = std::min(a, static_cast<int>(std::sqrt(ra)) + 1); b >= 0; --b) {
            const int rb = ra - b * b;
            if (rb < 0 || b > a) continue;
            for (int c = std::min(b, static_cast<int>(std::sqrt(rb)) + 1); c >= 0; --c) {
                const int rc = rb - c * c;
                if (rc < 0 || c > b) continue;
                const int e = static_cast<int>(std::round(std::sqrt(rc)));
                if (e <= c && e * e == rc) return {a, b, c, e};
            }
        }
    }
    fail(errc::invalid_config, "four-squares search failed"); // unreachable
}

MultiplicityProfile make_profile(int d) {
    if (d < 1) fail(errc::invalid_config, "profile requires d >= 1");
    const auto sq = four_squares(2 * d - 2);
    MultiplicityProfile p;
    for (int i = 0; i < 4; ++i) p.a[i] = sq[i];
    return p;
}

MultiplicityProfile parse_profile(const std::string& csv) {
    MultiplicityProfile p;
    std::stringstream ss(csv);
    std::string tok;
    int i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= 16) fail(errc::invalid_config, "profile has more than 16 entries");
        try {
            std::size_t pos = 0;
            const int v = std::stoi(tok, &pos);
            while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos])))
                ++pos;
            if (pos != tok.size() || v < 0)
                fail(errc::invalid_config, "profile entries must be nonnegative integers");
            p.a[i++] = v;
        } catch (const error&) {
            throw;
        } catch (const std::exception&) {
            fail(errc::invalid_config, "malformed profile entry '" + tok + "'");
        }
    }
    if (i != 16) fail(errc::invalid_config, "profile must have exactly 16 entries");
    return p;
}

ConditionMatrix condition_matrix(const EvenBasis& basis,
                                 const MultiplicityProfile& profile) {
    const int n = basis.size();
    const auto pts = basis.surface().two_torsion();

    ConditionMatrix cond;
    cond.rows.resize(profile.sum_squares(), n);
    int row = 0;
    for (int i = 0; i < 16; ++i) {
        const int ai = profile.a[i];
        if (ai == 0) continue;
        // even degrees 0..2a_i-2 become rows; odd degrees up to 2a_i-1 are
        // the parity cross-check
        const int maxdeg = 2 * ai - 1;
        const TaylorTable t = basis.eval_taylor(pts[i], maxdeg);

        double scale = 0.0;
        for (int g = 0; g < n; ++g)
            for (int b1 = 0; b1 <= maxdeg; ++b1)
                for (int b2 = 0; b1 + b2 <= maxdeg; ++b2)
                    scale = std::max(scale, std::abs(t.coeff(g, b1, b2)));
        for (int g = 0; g < n; ++g)
            for (int b1 = 0; b1 <= maxdeg; ++b1)
                for (int b2 = 0; b1 + b2 <= maxdeg; ++b2)
                    if ((b1 + b2) % 2 == 1 &&
                        std::abs(t.coeff(g, b1, b2)) > 1e-7 * scale)
                        fail(errc::parity_violation,
                             "odd-degree coefficient at two-torsion point " +
                                 std::to_string(i + 1));

        for (int e = 0; e <= 2 * ai - 2; e += 2)
            for (int b2 = 0; b2 <= e; ++b2) {
                for (int g = 0; g < n; ++g)
                    cond.rows(row, g) = t.coeff(g, e - b2, b2);
                const double norm = cond.rows.row(row).norm();
                if (norm > 0.0) cond.rows.row(row) /= norm;
                ++row;
            }
    }
    return cond;
}

LinearSubsystem solve_subsystem(const ConditionMatrix& cond,
                                const MultiplicityProfile& profile,
                                double rank_tol) {
    if (!(rank_tol > 0.0 && rank_tol < 1.0))
        fail(errc::invalid_config, "rank tolerance must lie in (0,1)");
    constexpr double kGapClip = 1e300;

    LinearSubsystem sub;
    sub.profile = profile;
    const int n = static_cast<int>(cond.rows.cols());
    const int m = cond.row_count();

    if (m == 0) {
        sub.coeffs = Eigen::MatrixXcd::Identity(n, n);
        sub.N = n - 1;
        sub.residual = 0.0;
        sub.rank_gap = kGapClip;
        return sub;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cond.rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const int nsv = static_cast<int>(sv.size());
    const double smax = sv(0);
    int rank = 0;
    for (int i = 0; i < nsv; ++i)
        if (sv(i) > rank_tol * smax) ++rank;

    if (rank > 0 && rank < nsv) {
        const double below = sv(rank);
        sub.rank_gap = below > 0.0 ? std::min(kGapClip, sv(rank - 1) / below)
                                   : kGapClip;
        if (sub.rank_gap < 1e3)
            fail(errc::rank_ambiguous,
                 "boundary singular values " + std::to_string(sv(rank - 1)) +
                     " / " + std::to_string(below));
    } else {
        sub.rank_gap = kGapClip;
    }

    const int dimv = n - rank;
    if (dimv < 4)
        fail(errc::subsystem_too_small,
             "dim V = " + std::to_string(dimv) + " < 4");

    sub.coeffs = svd.matrixV().rightCols(dimv).transpose();
    sub.N = dimv - 1;
    sub.residual = (cond.rows * sub.coeffs.transpose()).cwiseAbs().maxCoeff();
    return sub;
}

} // namespace irrmap
