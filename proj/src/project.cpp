#include "irrmap/project.hpp"

#include <map>

namespace irrmap {

const char* branch_name(CaseBranch b) {
    switch (b) {
        case CaseBranch::TwoFour: return "TwoFour";
        case CaseBranch::FourTwo: return "FourTwo";
        case CaseBranch::Anomalous: return "Anomalous";
    }
    return "Anomalous";
}

CaseBranch classify_case(const DegreeEstimate& est) {
    if (est.deg_phi == 2 && est.deg_S == 4) return CaseBranch::TwoFour;
    if (est.deg_phi == 4 && est.deg_S == 2) return CaseBranch::FourTwo;
    return CaseBranch::Anomalous;
}

namespace {

// (n-1) x n rows r with r * c = 0 (unconjugated): the orthonormal completion
// of conj(c), transposed. Scale-invariant in c.
Eigen::MatrixXcd annihilator_rows(const Eigen::VectorXcd& c) {
    const Eigen::Index n = c.size();
    if (n < 2 || !(c.norm() > 0.0))
        fail(errc::bad_center, "degenerate projection center");
    Eigen::MatrixXcd col = c.conjugate();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(col);
    Eigen::MatrixXcd q = qr.householderQ();
    return q.rightCols(n - 1).transpose();
}

// true when the composed map W * s(z) has differential rank 2 at one of a
// fixed deterministic batch of sample points
bool rank_two_somewhere(const RationalMapEval& m, const Eigen::MatrixXcd& w) {
    rng probe(0xface7UL);
    Jet jet;
    for (int trial = 0; trial < 8; ++trial) {
        Vec4 t;
        t << probe.uniform(), probe.uniform(), probe.uniform(), probe.uniform();
        const Vec2c z = m.surface().from_torus(t);
        if (m.near_base_point(z)) continue;
        m.raw_jet(z, jet);
        const Eigen::VectorXcd y = w * jet.v;
        int k = 0;
        const double ymax = y.cwiseAbs().maxCoeff(&k);
        if (ymax < 1e-12 * jet.v.norm()) continue; // hits the center chain
        const Eigen::VectorXcd y1 = w * jet.d1, y2 = w * jet.d2;
        const Eigen::Index n = y.size();
        Eigen::MatrixXcd diff(n - 1, 2);
        Eigen::Index row = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == k) continue;
            diff(row, 0) = (y1(i) * y(k) - y(i) * y1(k)) / (y(k) * y(k));
            diff(row, 1) = (y2(i) * y(k) - y(i) * y2(k)) / (y(k) * y(k));
            ++row;
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
        if (svd.singularValues()(1) >=
            m.tolerances().jacobian_gap * svd.singularValues()(0))
            return true;
    }
    return false;
}

ComposedMap build_chain(const RationalMapEval& m, CaseBranch branch, rng& r,
                        bool prefer_second_node) {
    const int N = m.ambient_dim();
    ComposedMap out;
    out.branch = branch;
    out.used_fallback_node = prefer_second_node;
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(N + 1, N + 1);
    int ambient = N;

    const auto project_step = [&](Eigen::VectorXcd center) {
        int k = 0;
        center.cwiseAbs().maxCoeff(&k);
        center /= center(k);
        out.centers.push_back(center);
        w = annihilator_rows(center) * w;
        --ambient;
        if (!rank_two_somewhere(m, w))
            fail(errc::bad_center, "projection drops rank at all samples");
    };

    while (ambient > 3) {
        Eigen::VectorXcd c(ambient + 1);
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = r.cgaussian();
        project_step(std::move(c));
    }

    if (branch == CaseBranch::TwoFour) {
        const NodeImages nodes = node_images(m);
        const Eigen::VectorXcd& q = prefer_second_node ? nodes.q16 : nodes.q15;
        Eigen::VectorXcd qc = w * q;
        if (qc.norm() < 1e-9 * q.norm())
            fail(errc::bad_center, "node image collides with an earlier center");
        project_step(std::move(qc));
    } else {
        // a generic point on the image surface (stereographic center)
        Eigen::VectorXcd v;
        for (int tries = 0;; ++tries) {
            if (tries >= 32)
                fail(errc::bad_center, "no generic image point found");
            Vec4 t;
            t << r.uniform(), r.uniform(), r.uniform(), r.uniform();
            const auto ev = m.eval(m.surface().from_torus(t));
            if (ev) {
                v = *ev;
                break;
            }
        }
        project_step(w * v);
    }

    out.plane_coeffs = w;
    out.plane_rows = w * m.comb();
    return out;
}

int mode_of(const std::vector<int>& v) {
    std::map<int, int> hist;
    for (int x : v) ++hist[x];
    int best = v.front(), n = 0;
    for (const auto& [val, cnt] : hist)
        if (cnt > n) {
            best = val;
            n = cnt;
        }
    return best;
}

} // namespace

NodeImages node_images(const RationalMapEval& m) {
    const auto pts = m.surface().two_torsion();
    const Vec2c p15 = pts[14].z, p16 = pts[15].z;
    const auto q15 = m.eval(p15);
    const auto q16 = m.eval(p16);
    if (!q15 || !q16)
        fail(errc::profile_violation,
             "map is indeterminate at a distinguished node");

    NodeImages out;
    out.q15 = *q15;
    out.q16 = *q16;
    out.separation = projective_dist(out.q15, out.q16);
    if (out.separation < 1e-8)
        fail(errc::profile_violation, "node images coincide projectively");

    // record how well a small neighborhood folds 2:1 through each node
    rng r(0xd15cUL);
    for (const Vec2c& p : {p15, p16})
        for (int trial = 0; trial < 4; ++trial) {
            Vec2c dw;
            dw << 0.01 * r.cgaussian(), 0.01 * r.cgaussian();
            const auto a = m.eval(p + dw);
            const auto b = m.eval(p - dw);
            if (!a || !b) continue;
            out.two_to_one_dev =
                std::max(out.two_to_one_dev, projective_dist(*a, *b));
        }
    return out;
}

ComposedMap compose_to_plane(const RationalMapEval& m, CaseBranch branch,
                             std::uint64_t seed, bool prefer_second_node) {
    if (branch == CaseBranch::Anomalous)
        fail(errc::invalid_config,
             "anomalous degree pattern has no composition recipe");
    if (m.ambient_dim() < 3)
        fail(errc::subsystem_too_small, "composition needs ambient P^3 or larger");

    rng r(seed);
    for (int attempt = 0;; ++attempt) {
        try {
            return build_chain(m, branch, r, prefer_second_node);
        } catch (const error& e) {
            if (e.code() != errc::bad_center || attempt >= 4) throw;
        }
    }
}

Certification certify_final_degree(const RationalMapEval& m,
                                   const ComposedMap& c, int n_trials,
                                   std::uint64_t seed, int grid) {
    if (n_trials < 20)
        fail(errc::invalid_config,
             "certification requires at least 20 plane targets");
    if (c.plane_rows.rows() != 3 || c.plane_coeffs.rows() != 3)
        fail(errc::invalid_config, "composed map is not planar");
    {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c.plane_coeffs);
        if (svd.singularValues()(2) < 1e-8 * svd.singularValues()(0))
            fail(errc::bad_center, "composed linear map has rank below 3");
    }

    detail::SliceProblem base;
    base.theta = &m.basis().full();
    base.proj_rows = c.plane_rows;
    base.full_rows = m.comb();
    base.exclusions = m.base_points();
    base.tol = m.tolerances();

    rng r(seed);
    std::vector<int> counts;
    std::vector<Eigen::MatrixXcd> slices;
    Certification cert;
    cert.n_targets = n_trials;
    cert.grid = grid;
    for (int trial = 0; trial < n_trials; ++trial) {
        Eigen::VectorXcd target(3);
        target << r.cgaussian(), r.cgaussian(), r.cgaussian();
        const Eigen::MatrixXcd ann = annihilator_rows(target); // 2 x 3
        detail::SliceProblem p = base;
        p.r1 = ann.row(0) * c.plane_rows;
        p.r2 = ann.row(1) * c.plane_rows;
        const auto sols = detail::solve_slice(p, grid, {});
        counts.push_back(static_cast<int>(sols.size()));
        slices.push_back(ann);
        for (const auto& sol : sols)
            cert.max_residual = std::max(cert.max_residual, sol.residual);
    }

    const int mode = mode_of(counts);
    int agree = 0;
    for (int x : counts)
        if (x == mode) ++agree;
    cert.stability = static_cast<double>(agree) / n_trials;
    if (2 * agree <= n_trials)
        fail(errc::count_unstable, "no strict majority across plane targets");

    // re-verify the first mode-consistent target at doubled resolution
    for (int trial = 0; trial < n_trials; ++trial) {
        if (counts[trial] != mode) continue;
        detail::SliceProblem p = base;
        p.r1 = slices[trial].row(0) * c.plane_rows;
        p.r2 = slices[trial].row(1) * c.plane_rows;
        const auto check = detail::solve_slice(p, 2 * grid, {});
        if (static_cast<int>(check.size()) != mode)
            fail(errc::count_unstable,
                 "plane fiber counts differ between grid " +
                     std::to_string(grid) + " and " + std::to_string(2 * grid));
        break;
    }

    if (mode % 2 != 0)
        fail(errc::count_unstable,
             "odd plane fiber count " + std::to_string(mode));
    if (mode == 2)
        fail(errc::measured_degree_two,
             "measured plane degree 2 contradicts the no-degree-2 lemma");
    if (mode > 4)
        fail(errc::degree_bound_violated,
             "measured plane degree " + std::to_string(mode) + " exceeds 4");
    cert.final_degree = mode;
    return cert;
}

} // namespace irrmap
