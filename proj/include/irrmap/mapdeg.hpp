#pragma once

// The rational map phi: A -> P^N defined by a linear subsystem, and degree
// measurement by multi-start Newton root finding on the real 4-torus.
//
// All equations solved here are linear functionals of the full theta basis:
// a slice problem carries two functional rows, the map-coordinate rows (for
// proportionality grouping and indeterminacy filtering), and the excluded
// base points. Solving a generic codimension-2 slice through a target point
// yields deg(phi) * deg(S) solutions grouped into deg(S) proportionality
// classes, one of which is the fiber of the target.

#include "irrmap/profile.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace irrmap {

struct MapTolerances {
    double newton_tol = 1e-10;      // scale-free functional residual
    double dedup_radius = 1e-6;     // torus-coordinate wrap distance
    double base_exclusion = 1e-3;   // torus-coordinate wrap distance
    double indeterminate_tol = 1e-12;
    double proportional_tol = 1e-6; // projective distance for fiber grouping
    double jacobian_gap = 1e-6;     // singular-value ratio for rank 2
    double filter_rel = 1e-8;       // map-coordinate collapse filter
    // Converged slice points where all map coordinates fall below this
    // fraction of the theta scale sit on (or numerically near) the
    // indeterminacy locus and are not isolated fiber members. Honest fiber
    // points of generic targets stay several orders above it.
    double indeterminacy_rel = 1e-6;
    int max_newton_iters = 24;
};

// Wrapped torus distance (max metric on [0,1)^4 coordinates).
double torus_dist(const Vec4& a, const Vec4& b);

// 1 - |<a,b>| / (|a||b|): zero iff a, b are the same projective point.
double projective_dist(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// Maximum number of concurrent Newton chunks (IRRMAP_THREADS, default =
// logical cores). Results are independent of the value.
unsigned max_threads();

class RationalMapEval {
public:
    RationalMapEval(EvenBasis basis, LinearSubsystem sub, MapTolerances tol = {});

    const PolarizedAbelianSurface& surface() const { return basis_.surface(); }
    const EvenBasis& basis() const { return basis_; }
    const LinearSubsystem& subsystem() const { return sub_; }
    const MapTolerances& tolerances() const { return tol_; }
    int ambient_dim() const { return sub_.N; }
    // Map coordinates expressed on the full theta basis, (N+1) x 4d.
    const Eigen::MatrixXcd& comb() const { return comb_; }
    const std::vector<Vec2c>& base_points() const { return base_; }
    double reference_scale() const { return ref_scale_; }

    // Section vector s(z) and its z-derivatives (out vectors sized N+1).
    void raw_jet(const Vec2c& z, Jet& out) const;
    bool near_base_point(const Vec2c& z) const;

    // Projective image, largest coordinate normalized to 1; nullopt when z
    // is within the base-point exclusion radius or all coordinates vanish
    // below the indeterminacy tolerance.
    std::optional<Eigen::VectorXcd> eval(const Vec2c& z) const;

    // Rank of the differential in the affine chart of the largest
    // coordinate; throws errc::rank_ambiguous on an unclear spectrum.
    int jacobian_rank(const Vec2c& z) const;

private:
    EvenBasis basis_;
    LinearSubsystem sub_;
    MapTolerances tol_;
    Eigen::MatrixXcd comb_;
    std::vector<Vec2c> base_;
    double ref_scale_ = 0.0;
};

namespace detail {

struct SliceSolution {
    Vec2c z;         // reduced representative
    Vec4 t;          // torus coordinates in [0,1)^4
    double residual; // scale-free functional residual
};

struct SliceProblem {
    const ThetaBasis* theta = nullptr;
    Eigen::RowVectorXcd r1, r2;   // the two equations, rows over 4d
    Eigen::MatrixXcd proj_rows;   // map coordinates, rows over 4d
    Eigen::MatrixXcd full_rows;   // pre-composition coordinates (scale ref)
    std::vector<Vec2c> exclusions;
    MapTolerances tol;
};

// Multi-start Newton from a grid^4 lattice of seeds plus explicit extras;
// deduplicated modulo the period lattice, deterministic for fixed inputs.
// Throws errc::fiber_search_failed when nothing converges and
// errc::count_unstable when the solution set blows up (positive-dimensional
// locus).
std::vector<SliceSolution> solve_slice(const SliceProblem& p, int grid,
                                       const std::vector<Vec2c>& extra_seeds);

} // namespace detail

struct FiberReport {
    Eigen::VectorXcd target;       // normalized projective target point
    std::vector<Vec4> solutions;   // fiber points, sorted torus coordinates
    std::vector<double> residuals;
    int count = 0;                 // |solutions| = local degree of phi
    int total = 0;                 // all slice solutions through the target
    int classes = 0;               // proportionality classes in the slice
    double max_residual = 0.0;
};

// Fiber of phi over phi(z0) via a generic codimension-2 slice; z0 and -z0
// are appended to the seed list (they are known members of the fiber).
FiberReport fiber(const RationalMapEval& m, const Vec2c& z0, int grid,
                  double newton_tol, std::uint64_t seed);

struct DegreeEstimate {
    int deg_phi = 0;
    int deg_S = 0;
    int product = 0;
    int n_trials = 0;
    double stability = 0.0;    // fraction of trials agreeing with the mode
    double max_residual = 0.0;
    int grid = 0;
};

// Repeats fiber measurements at random targets, takes the stable mode,
// re-verifies the first trial at doubled grid resolution, and enforces the
// ceiling deg(phi) * deg(S) <= 8 plus parity/nondegeneracy checks.
DegreeEstimate estimate_degrees(const RationalMapEval& m, int n_trials,
                                std::uint64_t seed, int grid = 16);

} // namespace irrmap
