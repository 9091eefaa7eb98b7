#pragma once

// Multiplicity profiles (a_1..a_16) with sum of squares 2d-2 and
// a_15 = a_16 = 0, the vanishing-condition matrix they impose on the even
// basis, and extraction of the linear subsystem V (sections vanishing to
// order >= 2 a_i at the i-th two-torsion point).

#include "irrmap/theta.hpp"

#include <array>
#include <string>

namespace irrmap {

struct MultiplicityProfile {
    std::array<int, 16> a{};

    int sum_squares() const {
        int s = 0;
        for (int v : a) s += v * v;
        return s;
    }
    bool valid_for(int d) const {
        return sum_squares() == 2 * d - 2 && a[14] == 0 && a[15] == 0;
    }
};

// Lexicographically largest (a >= b >= c >= e >= 0) with a^2+b^2+c^2+e^2 = n.
std::array<int, 4> four_squares(int n);

// Default profile: four_squares(2d-2) at indices 1..4, zeros elsewhere.
MultiplicityProfile make_profile(int d);

// Parses 16 comma-separated nonnegative integers ("auto" is handled by the
// caller). Throws errc::invalid_config on malformed input.
MultiplicityProfile parse_profile(const std::string& csv);

struct ConditionMatrix {
    // One row per even-degree Taylor coefficient (degrees 0, 2, .., 2a_i - 2
    // at each point with a_i > 0), normalized to unit length; columns index
    // the even basis. Row count is sum a_i^2.
    Eigen::MatrixXcd rows;

    int row_count() const { return static_cast<int>(rows.rows()); }
};

// Assembles the matrix and cross-checks that odd-degree coefficients of the
// even basis vanish (relative 1e-7), else throws errc::parity_violation.
ConditionMatrix condition_matrix(const EvenBasis& basis,
                                 const MultiplicityProfile& profile);

struct LinearSubsystem {
    MultiplicityProfile profile;
    // Orthonormal rows spanning the nullspace of the condition matrix,
    // expressed in even-basis coordinates; (N+1) x (2d+2).
    Eigen::MatrixXcd coeffs;
    int N = 0;             // projective dimension of P(V)
    double residual = 0;   // max |condition . basis vector|
    double rank_gap = 0;   // boundary singular-value ratio (clipped to 1e300)

    int dim() const { return N + 1; }
};

// Nullspace extraction with an explicit rank decision: singular values above
// rank_tol x largest are conditions; a boundary ratio under 10^3 throws
// errc::rank_ambiguous, and dim V < 4 throws errc::subsystem_too_small.
LinearSubsystem solve_subsystem(const ConditionMatrix& cond,
                                const MultiplicityProfile& profile,
                                double rank_tol = 1e-8);

} // namespace irrmap
