#pragma once

// Case analysis and linear projections taking the ambient map A -> P^N down
// to the plane, plus certification of the final mapping degree.
//
// Every projection is a linear quotient of homogeneous coordinates: rows
// annihilating the center are stacked onto the accumulated coordinate map,
// so the composed plane map stays a linear combination of the original
// sections. Degrees are measured with the same multi-start Newton slices as
// the degree estimator; preimages of the projection centers are filtered by
// the relative-collapse test.

#include "irrmap/mapdeg.hpp"

namespace irrmap {

enum class CaseBranch { TwoFour, FourTwo, Anomalous };

const char* branch_name(CaseBranch b);

// TwoFour iff (deg phi, deg S) = (2, 4); FourTwo iff (4, 2); everything else
// is Anomalous (reported, never silently accepted).
CaseBranch classify_case(const DegreeEstimate& est);

struct NodeImages {
    Eigen::VectorXcd q15, q16;    // normalized projective points in P^N
    double separation = 0.0;      // projective distance between them
    double two_to_one_dev = 0.0;  // max dev of phi(p+w) vs phi(p-w) samples
};

// Images of the two distinguished two-torsion points (array indices 14, 15)
// that carry no profile weight. Throws errc::profile_violation when the map
// is indeterminate at either node or the images coincide projectively.
NodeImages node_images(const RationalMapEval& m);

struct ComposedMap {
    CaseBranch branch = CaseBranch::Anomalous;
    // one center per projection step, each in its own ambient space,
    // descending from P^N to P^3; the last center lands in P^2
    std::vector<Eigen::VectorXcd> centers;
    Eigen::MatrixXcd plane_coeffs; // 3 x (N+1), on the subsystem sections
    Eigen::MatrixXcd plane_rows;   // 3 x 4d, on the full theta basis
    bool used_fallback_node = false;
};

// Chain of point projections: random points off the image surface while the
// ambient dimension exceeds 3, then the branch-specific center in P^3
// (TwoFour: the node image q15, or q16 when `prefer_second_node`; FourTwo: a
// generic image point, stereographic). Each step is validated by sampling
// the composed differential; a center failing at every sample raises
// errc::bad_center and the chain is retried with fresh draws, up to 5 times.
ComposedMap compose_to_plane(const RationalMapEval& m, CaseBranch branch,
                             std::uint64_t seed, bool prefer_second_node = false);

struct Certification {
    int final_degree = 0;
    int n_targets = 0;
    double stability = 0.0;    // fraction of targets agreeing with the mode
    double max_residual = 0.0;
    int grid = 0;
};

// Measures the degree of the composed map A -> P^2 over n_trials random
// plane targets (at least 20), re-verifies the first mode-consistent target
// at doubled grid resolution, and asserts the count is even, not 2
// (errc::measured_degree_two), and at most 4 (errc::degree_bound_violated).
Certification certify_final_degree(const RationalMapEval& m,
                                   const ComposedMap& c, int n_trials,
                                   std::uint64_t seed, int grid = 12);

} // namespace irrmap
