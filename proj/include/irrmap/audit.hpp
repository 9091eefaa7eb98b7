#pragma once

// Exact integer verification of the multiplicity inequality chains. No check
// in this header touches floating point; fractional steps (d_i/2, half sums
// of squares) are verified in 2x- or 4x-scaled integers.
//
// Index conventions match the profile: 16 two-torsion multiplicities, array
// indices 14 and 15 are the two distinguished nodes that must stay
// unweighted. In the fixed-branch audit d_i := f_i + m_i.

#include "irrmap/errors.hpp"

#include <array>
#include <string>
#include <vector>

namespace irrmap {

struct AuditCheck {
    std::string name;
    bool pass = false;
    long long lhs = 0;
    long long rhs = 0;
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    bool all_pass() const;
    const AuditCheck& at(const std::string& name) const; // throws if missing
};

// Profile identities: sum a_i^2 = 2d - 2, the distinguished nodes carry no
// weight, and the dimension count 2d + 2 - sum a_i^2 = 4. Failures are
// report entries, not errors.
AuditReport audit_profile(int d, const std::array<int, 16>& a);

// Movable-system bound: 8d - sum d_i^2 <= 4(2d - sum a_i^2) = 8.
// Pre: d_i >= 2 a_i (errc::invalid_audit_input otherwise).
AuditReport audit_no_fixed_chain(int d, const std::array<int, 16>& a,
                                 const std::array<int, 16>& d_mults);

// Fixed-branch chain with d_i = f_i + m_i:
//   2d - sum f_i^2 = -4            (self-intersection bookkeeping, 2x scale)
//   4 sum f_i m_i <= sum d_i^2     (AM-GM, 4x scale)
//   2 sum d_i^2 <= (4d+8) + 2 sum m_i^2 + sum d_i^2
//   sum d_i^2 >= 4 sum a_i^2
//   2 sum m_i^2 >= sum d_i^2 - 4d - 8
//   sum m_i^2 >= 2d - 8
//   2d - sum m_i^2 <= 8
// Pre: f_i, m_i >= 0, f_i + m_i >= 2 a_i, sum f_i^2 = 2d + 4
// (errc::invalid_audit_input otherwise).
AuditReport audit_fixed_chain(int d, const std::array<int, 16>& a,
                              const std::array<int, 16>& f_mults,
                              const std::array<int, 16>& m_mults);

struct ReplayResult {
    long long tuples = 0;
    long long counterexamples = 0;
    int max_d = 0;
};

// Exhaustive replay of the fixed-branch bound: for every d <= max_d, every
// nonnegative (f, m) pair supported on the default-profile indices padded to
// 4 slots, with sum f_i^2 = 2d + 4 and f_i + m_i >= 2 a_i, runs the full
// chain audit. m_i ranges from its minimum to minimum + slack; sum m_i^2 is
// monotone in each m_i, so the slack window covers the binding region.
ReplayResult replay_fixed_component_bound(int max_d = 10, int slack = 3);

} // namespace irrmap
