#include "irrmap/mapdeg.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <map>
#include <thread>

namespace irrmap {

double torus_dist(const Vec4& a, const Vec4& b) {
    double m = 0.0;
    for (int i = 0; i < 4; ++i) {
        double d = std::abs(a(i) - b(i));
        d = std::min(d, 1.0 - d);
        m = std::max(m, d);
    }
    return m;
}

double projective_dist(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return 1.0 - std::abs(a.dot(b)) / (a.norm() * b.norm());
}

unsigned max_threads() {
    if (const char* env = std::getenv("IRRMAP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// ---------------------------------------------------------------------------
// RationalMapEval

RationalMapEval::RationalMapEval(EvenBasis basis, LinearSubsystem sub,
                                 MapTolerances tol)
    : basis_(std::move(basis)), sub_(std::move(sub)), tol_(tol) {
    if (sub_.coeffs.cols() != basis_.size())
        fail(errc::dimension_mismatch, "subsystem does not match the even basis");
    comb_ = sub_.coeffs * basis_.coeff();

    const auto pts = surface().two_torsion();
    for (int i = 0; i < 16; ++i)
        if (sub_.profile.a[i] > 0) base_.push_back(pts[i].z);

    // deterministic reference scale for indeterminacy decisions
    rng r(0x5ca1eULL);
    Jet jet;
    for (int i = 0; i < 8; ++i) {
        Vec4 t;
        t << r.uniform(), r.uniform(), r.uniform(), r.uniform();
        raw_jet(surface().from_torus(t), jet);
        ref_scale_ = std::max(ref_scale_, jet.v.cwiseAbs().maxCoeff());
    }
}

void RationalMapEval::raw_jet(const Vec2c& z, Jet& out) const {
    thread_local Jet full;
    basis_.full().eval_jet(z, full);
    out.v.noalias() = comb_ * full.v;
    out.d1.noalias() = comb_ * full.d1;
    out.d2.noalias() = comb_ * full.d2;
}

bool RationalMapEval::near_base_point(const Vec2c& z) const {
    const Vec4 t = surface().torus_coords(z);
    for (const Vec2c& b : base_)
        if (torus_dist(t, surface().torus_coords(b)) < tol_.base_exclusion)
            return true;
    return false;
}

std::optional<Eigen::VectorXcd> RationalMapEval::eval(const Vec2c& z) const {
    if (near_base_point(z)) return std::nullopt;
    thread_local Jet jet;
    raw_jet(z, jet);
    int imax = 0;
    const double vmax = jet.v.cwiseAbs().maxCoeff(&imax);
    if (vmax < tol_.indeterminate_tol * ref_scale_) return std::nullopt;
    return Eigen::VectorXcd(jet.v / jet.v(imax));
}

int RationalMapEval::jacobian_rank(const Vec2c& z) const {
    thread_local Jet jet;
    raw_jet(z, jet);
    int k = 0;
    const double vmax = jet.v.cwiseAbs().maxCoeff(&k);
    if (vmax < tol_.indeterminate_tol * ref_scale_)
        fail(errc::invalid_config, "jacobian requested at an indeterminate point");

    // differential of the affine chart u_i = s_i / s_k
    const int n = static_cast<int>(jet.v.size());
    Eigen::MatrixXcd diff(n - 1, 2);
    const cdouble sk = jet.v(k), d1k = jet.d1(k), d2k = jet.d2(k);
    int row = 0;
    for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        diff(row, 0) = (jet.d1(i) * sk - jet.v(i) * d1k) / (sk * sk);
        diff(row, 1) = (jet.d2(i) * sk - jet.v(i) * d2k) / (sk * sk);
        ++row;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
    const double s1 = svd.singularValues()(0);
    const double s2 = svd.singularValues()(1);
    if (s1 < 1e-12) return 0;
    const double ratio = s2 / s1;
    if (ratio >= tol_.jacobian_gap) return 2;
    if (ratio < 1e-3 * tol_.jacobian_gap) return 1;
    fail(errc::rank_ambiguous,
         "differential singular-value ratio " + std::to_string(ratio));
}

// ---------------------------------------------------------------------------
// slice solver

namespace detail {

namespace {

constexpr int kMaxDistinct = 512;

struct NewtonScratch {
    Jet jet;
};

// One Newton run; returns false when the seed leaves the basin, hits a
// singular jacobian, or fails to meet the residual tolerance.
bool newton_run(const SliceProblem& p, Vec2c z, NewtonScratch& ws,
                SliceSolution& out) {
    const double r1n = p.r1.norm(), r2n = p.r2.norm();
    int polish = 0;
    for (int iter = 0; iter < p.tol.max_newton_iters; ++iter) {
        p.theta->eval_jet(z, ws.jet);
        const cdouble g1 = p.r1 * ws.jet.v;
        const cdouble g2 = p.r2 * ws.jet.v;
        const double vn = ws.jet.v.norm();
        if (!(vn > 0.0)) return false;
        const double resid =
            std::max(std::abs(g1) / (r1n * vn), std::abs(g2) / (r2n * vn));
        if (!(resid == resid)) return false; // NaN guard
        if (resid < p.tol.newton_tol && polish >= 2) {
            out.z = z;
            out.residual = resid;
            return true;
        }
        if (resid < p.tol.newton_tol) ++polish;

        const cdouble j11 = p.r1 * ws.jet.d1, j12 = p.r1 * ws.jet.d2;
        const cdouble j21 = p.r2 * ws.jet.d1, j22 = p.r2 * ws.jet.d2;
        const cdouble det = j11 * j22 - j12 * j21;
        const double jscale = (std::abs(j11) + std::abs(j12)) *
                              (std::abs(j21) + std::abs(j22));
        if (std::abs(det) < 1e-14 * jscale + 1e-280) return false;
        const cdouble dz1 = (-g1 * j22 + g2 * j12) / det;
        const cdouble dz2 = (-g2 * j11 + g1 * j21) / det;
        const double step =
            std::sqrt(std::norm(dz1) + std::norm(dz2));
        if (polish == 0 && step > 0.5) return false; // left the basin
        z(0) += dz1;
        z(1) += dz2;
    }
    return false;
}

bool lex_less(const Vec4& a, const Vec4& b) {
    for (int i = 0; i < 4; ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

// Accepts a converged point into a deduplicated list. Keeps the
// lexicographically smallest representative of each cluster so the outcome
// is independent of seed-chunk partitioning.
void accept(const SliceProblem& p, const SliceSolution& raw,
            std::vector<SliceSolution>& list) {
    const auto& surf = p.theta->surface();
    Vec2i j, k;
    SliceSolution sol;
    sol.z = surf.reduce(raw.z, j, k);
    sol.t = surf.torus_coords(sol.z);
    sol.residual = raw.residual;

    for (const Vec2c& ex : p.exclusions)
        if (torus_dist(sol.t, surf.torus_coords(ex)) < p.tol.base_exclusion)
            return;

    thread_local Jet jet;
    p.theta->eval_jet(sol.z, jet);
    const Eigen::VectorXcd full = p.full_rows * jet.v;
    const Eigen::VectorXcd proj = p.proj_rows * jet.v;
    const double fnorm = full.norm();
    // residue of an undetected indeterminacy locus
    if (fnorm < p.tol.indeterminacy_rel * p.full_rows.norm() * jet.v.norm())
        return;
    // collapse under the linear composition (projection-center preimage)
    if (proj.norm() < p.tol.filter_rel * fnorm) return;

    for (auto& e : list)
        if (torus_dist(sol.t, e.t) < p.tol.dedup_radius) {
            if (lex_less(sol.t, e.t)) e = sol;
            return;
        }
    list.push_back(sol);
    if (list.size() > kMaxDistinct)
        fail(errc::count_unstable,
             "slice solution set exceeds " + std::to_string(kMaxDistinct) +
                 " points (positive-dimensional locus?)");
}

void run_range(const SliceProblem& p, int grid, std::int64_t lo, std::int64_t hi,
               std::vector<SliceSolution>& list) {
    NewtonScratch ws;
    SliceSolution raw;
    const auto& surf = p.theta->surface();
    const double g = grid;
    for (std::int64_t idx = lo; idx < hi; ++idx) {
        std::int64_t q = idx;
        const int i = static_cast<int>(q % grid);
        q /= grid;
        const int j = static_cast<int>(q % grid);
        q /= grid;
        const int k = static_cast<int>(q % grid);
        q /= grid;
        const int l = static_cast<int>(q);
        Vec4 t;
        t << (i + 0.5) / g, (j + 0.5) / g, (k + 0.5) / g, (l + 0.5) / g;
        if (newton_run(p, surf.from_torus(t), ws, raw)) accept(p, raw, list);
    }
}

} // namespace

std::vector<SliceSolution> solve_slice(const SliceProblem& p, int grid,
                                       const std::vector<Vec2c>& extra_seeds) {
    if (grid < 2) fail(errc::invalid_config, "seed grid must be at least 2");

    std::vector<SliceSolution> merged;
    NewtonScratch ws;
    SliceSolution raw;
    for (const Vec2c& z : extra_seeds)
        if (newton_run(p, z, ws, raw)) accept(p, raw, merged);

    const std::int64_t total =
        static_cast<std::int64_t>(grid) * grid * grid * grid;
    const unsigned nthreads =
        std::min<std::int64_t>(max_threads(), std::max<std::int64_t>(1, total / 4096));

    if (nthreads <= 1) {
        run_range(p, grid, 0, total, merged);
    } else {
        std::vector<std::vector<SliceSolution>> parts(nthreads);
        std::vector<std::exception_ptr> errs(nthreads);
        std::vector<std::thread> pool;
        for (unsigned c = 0; c < nthreads; ++c) {
            const std::int64_t lo = total * c / nthreads;
            const std::int64_t hi = total * (c + 1) / nthreads;
            pool.emplace_back([&, c, lo, hi] {
                try {
                    run_range(p, grid, lo, hi, parts[c]);
                } catch (...) {
                    errs[c] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
        for (auto& part : parts)
            for (auto& sol : part) accept(p, sol, merged);
    }

    if (merged.empty())
        fail(errc::fiber_search_failed, "no Newton start converged");
    std::sort(merged.begin(), merged.end(),
              [](const SliceSolution& a, const SliceSolution& b) {
                  return lex_less(a.t, b.t);
              });
    return merged;
}

} // namespace detail

// ---------------------------------------------------------------------------
// fiber and degree estimation

namespace {

// random unit functional annihilating `target`, hermitian-orthogonalized
// against `others` for conditioning
Eigen::VectorXcd annihilator(const Eigen::VectorXcd& target,
                             const std::vector<Eigen::VectorXcd>& others,
                             rng& r) {
    const Eigen::VectorXcd c = target.conjugate();
    for (int attempt = 0; attempt < 64; ++attempt) {
        Eigen::VectorXcd a(target.size());
        for (int i = 0; i < a.size(); ++i) a(i) = r.cgaussian();
        a -= c * (c.dot(a) / c.squaredNorm());
        for (const auto& o : others) a -= o * (o.dot(a) / o.squaredNorm());
        const double n = a.norm();
        if (n > 1e-6) return a / n;
    }
    fail(errc::fiber_search_failed, "could not draw a generic annihilator");
}

} // namespace

FiberReport fiber(const RationalMapEval& m, const Vec2c& z0, int grid,
                  double newton_tol, std::uint64_t seed) {
    const auto v0 = m.eval(z0);
    if (!v0) fail(errc::invalid_config, "fiber target is indeterminate");

    rng r(seed);
    const Eigen::VectorXcd a1 = annihilator(*v0, {}, r);
    const Eigen::VectorXcd a2 = annihilator(*v0, {a1}, r);

    detail::SliceProblem p;
    p.theta = &m.basis().full();
    p.r1 = a1.transpose() * m.comb();
    p.r2 = a2.transpose() * m.comb();
    p.proj_rows = m.comb();
    p.full_rows = m.comb();
    p.exclusions = m.base_points();
    p.tol = m.tolerances();
    p.tol.newton_tol = newton_tol;

    const auto sols = detail::solve_slice(p, grid, {z0, Vec2c(-z0)});

    FiberReport rep;
    rep.target = *v0;
    rep.total = static_cast<int>(sols.size());

    std::vector<Eigen::VectorXcd> class_reps;
    Jet jet;
    for (const auto& sol : sols) {
        m.raw_jet(sol.z, jet);
        const Eigen::VectorXcd v = jet.v;
        bool in_fiber = projective_dist(v, *v0) < p.tol.proportional_tol;
        if (in_fiber) {
            rep.solutions.push_back(sol.t);
            rep.residuals.push_back(sol.residual);
            rep.max_residual = std::max(rep.max_residual, sol.residual);
        }
        bool matched = false;
        for (const auto& rep_v : class_reps)
            if (projective_dist(v, rep_v) < p.tol.proportional_tol) {
                matched = true;
                break;
            }
        if (!matched) class_reps.push_back(v);
    }
    rep.count = static_cast<int>(rep.solutions.size());
    rep.classes = static_cast<int>(class_reps.size());
    return rep;
}

namespace {

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

DegreeEstimate estimate_degrees(const RationalMapEval& m, int n_trials,
                                std::uint64_t seed, int grid) {
    if (n_trials < 5)
        fail(errc::invalid_config, "degree estimation requires >= 5 trials");

    rng r(seed);
    std::vector<FiberReport> reports;
    std::vector<Vec2c> targets;
    std::vector<std::uint64_t> subseeds;
    int attempts = 0;
    while (static_cast<int>(reports.size()) < n_trials) {
        if (++attempts > 20 * n_trials)
            fail(errc::fiber_search_failed, "no usable degree-trial targets");
        Vec4 t;
        t << r.uniform(), r.uniform(), r.uniform(), r.uniform();
        const Vec2c z0 = m.surface().from_torus(t);
        const std::uint64_t sub = r.raw();
        if (!m.eval(z0)) continue;
        try {
            if (m.jacobian_rank(z0) != 2) continue;
        } catch (const error& e) {
            if (e.code() == errc::rank_ambiguous) continue;
            throw;
        }
        reports.push_back(fiber(m, z0, grid, m.tolerances().newton_tol, sub));
        targets.push_back(z0);
        subseeds.push_back(sub);
    }

    std::vector<int> fibers, totals;
    for (const auto& rep : reports) {
        fibers.push_back(rep.count);
        totals.push_back(rep.total);
    }
    DegreeEstimate est;
    est.n_trials = n_trials;
    est.grid = grid;
    est.deg_phi = mode_of(fibers);
    const int total = mode_of(totals);
    int agree = 0;
    for (int i = 0; i < n_trials; ++i)
        if (fibers[i] == est.deg_phi && totals[i] == total) ++agree;
    est.stability = static_cast<double>(agree) / n_trials;
    for (const auto& rep : reports)
        est.max_residual = std::max(est.max_residual, rep.max_residual);
    if (2 * agree <= n_trials)
        fail(errc::count_unstable, "no strict majority across degree trials");

    // grid-doubling verification on the first mode-consistent trial
    for (int i = 0; i < n_trials; ++i) {
        if (fibers[i] != est.deg_phi || totals[i] != total) continue;
        const FiberReport check = fiber(m, targets[i], 2 * grid,
                                        m.tolerances().newton_tol, subseeds[i]);
        if (check.count != est.deg_phi || check.total != total)
            fail(errc::count_unstable,
                 "fiber counts differ between grid " + std::to_string(grid) +
                     " and " + std::to_string(2 * grid));
        break;
    }

    if (est.deg_phi % 2 != 0)
        fail(errc::count_unstable,
             "odd fiber count " + std::to_string(est.deg_phi) +
                 " (phi must factor through the involution)");
    if (total % est.deg_phi != 0)
        fail(errc::inconsistent_degrees,
             "slice total " + std::to_string(total) +
                 " not divisible by fiber count " + std::to_string(est.deg_phi));
    est.deg_S = total / est.deg_phi;
    est.product = total;

    std::vector<int> classes;
    for (const auto& rep : reports) classes.push_back(rep.classes);
    if (mode_of(classes) != est.deg_S)
        fail(errc::inconsistent_degrees,
             "proportionality classes disagree with deg S");
    if (m.ambient_dim() >= 3 && est.deg_S < 2)
        fail(errc::inconsistent_degrees, "image is degenerate (deg S < 2)");
    if (est.product > 8)
        fail(errc::degree_bound_violated,
             "measured product " + std::to_string(est.product) + " exceeds 8");
    return est;
}

} // namespace irrmap
