#include "irrmap/audit.hpp"

#include "irrmap/profile.hpp"

namespace irrmap {

namespace {

using I16 = std::array<int, 16>;

long long sum_sq(const I16& v) {
    long long s = 0;
    for (int x : v) s += static_cast<long long>(x) * x;
    return s;
}

long long sum_prod(const I16& u, const I16& v) {
    long long s = 0;
    for (int i = 0; i < 16; ++i)
        s += static_cast<long long>(u[i]) * v[i];
    return s;
}

void require_nonneg(const I16& v, const char* what) {
    for (int x : v)
        if (x < 0) fail(errc::invalid_audit_input,
                        std::string(what) + " multiplicities must be nonnegative");
}

void require_d(int d) {
    if (d < 1) fail(errc::invalid_audit_input, "polarization type must be positive");
}

void push(AuditReport& rep, const char* name, bool pass, long long lhs,
          long long rhs) {
    rep.checks.push_back({name, pass, lhs, rhs});
}

} // namespace

bool AuditReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const AuditCheck& AuditReport::at(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    fail(errc::invalid_audit_input, "no audit check named " + name);
}

AuditReport audit_profile(int d, const I16& a) {
    require_d(d);
    require_nonneg(a, "profile");
    const long long sq = sum_sq(a);
    AuditReport rep;
    push(rep, "profile_sum_squares", sq == 2LL * d - 2, sq, 2LL * d - 2);
    const long long nodes =
        static_cast<long long>(a[14]) * a[14] + static_cast<long long>(a[15]) * a[15];
    push(rep, "profile_nodes_clear", nodes == 0, nodes, 0);
    push(rep, "dimension_count", 2LL * d + 2 - sq == 4, 2LL * d + 2 - sq, 4);
    return rep;
}

AuditReport audit_no_fixed_chain(int d, const I16& a, const I16& d_mults) {
    require_d(d);
    require_nonneg(a, "profile");
    require_nonneg(d_mults, "divisor");
    for (int i = 0; i < 16; ++i)
        if (d_mults[i] < 2 * a[i])
            fail(errc::invalid_audit_input,
                 "divisor multiplicity below twice the profile weight");
    const long long sd = sum_sq(d_mults), sa = sum_sq(a);
    AuditReport rep;
    push(rep, "product_bound", 8LL * d - sd <= 4 * (2LL * d - sa), 8LL * d - sd,
         4 * (2LL * d - sa));
    push(rep, "bound_equals_8", 4 * (2LL * d - sa) == 8, 4 * (2LL * d - sa), 8);
    return rep;
}

AuditReport audit_fixed_chain(int d, const I16& a, const I16& f_mults,
                              const I16& m_mults) {
    require_d(d);
    require_nonneg(a, "profile");
    require_nonneg(f_mults, "fixed-part");
    require_nonneg(m_mults, "movable-part");
    I16 d_mults{};
    for (int i = 0; i < 16; ++i) {
        d_mults[i] = f_mults[i] + m_mults[i];
        if (d_mults[i] < 2 * a[i])
            fail(errc::invalid_audit_input,
                 "f_i + m_i below twice the profile weight");
    }
    const long long sf = sum_sq(f_mults);
    if (sf != 2LL * d + 4)
        fail(errc::invalid_audit_input,
             "fixed-part squares must sum to 2d + 4, got " + std::to_string(sf));
    const long long sm = sum_sq(m_mults), sd = sum_sq(d_mults), sa = sum_sq(a);
    const long long cross = sum_prod(f_mults, m_mults);

    AuditReport rep;
    push(rep, "fixed_self_intersection", 2LL * d - sf == -4, 2LL * d - sf, -4);
    push(rep, "am_gm_cross", 4 * cross <= sd, 4 * cross, sd);
    push(rep, "square_partition", 2 * sd <= (4LL * d + 8) + 2 * sm + sd, 2 * sd,
         (4LL * d + 8) + 2 * sm + sd);
    push(rep, "node_floor", sd >= 4 * sa, sd, 4 * sa);
    push(rep, "movable_floor", 2 * sm >= sd - 4LL * d - 8, 2 * sm,
         sd - 4LL * d - 8);
    push(rep, "movable_square_bound", sm >= 2LL * d - 8, sm, 2LL * d - 8);
    push(rep, "movable_ceiling", 2LL * d - sm <= 8, 2LL * d - sm, 8);
    return rep;
}

ReplayResult replay_fixed_component_bound(int max_d, int slack) {
    if (max_d < 1 || slack < 0)
        fail(errc::invalid_audit_input, "invalid replay bounds");

    ReplayResult out;
    out.max_d = max_d;
    for (int d = 1; d <= max_d; ++d) {
        const auto profile = make_profile(d);
        // support: the weighted profile slots padded with unweighted ones
        std::array<int, 4> sup_a{};
        int k = 0;
        for (int i = 0; i < 16 && k < 4; ++i)
            if (profile.a[i] > 0) sup_a[k++] = profile.a[i];
        // remaining slots keep a = 0 (indices 4..13 are interchangeable)

        const long long target = 2LL * d + 4;
        std::array<int, 4> f{};
        const auto run_m = [&](const std::array<int, 4>& fv) {
            std::array<int, 4> lo{};
            for (int i = 0; i < 4; ++i)
                lo[i] = std::max(0, 2 * sup_a[i] - fv[i]);
            std::array<int, 4> m{};
            for (int m0 = lo[0]; m0 <= lo[0] + slack; ++m0)
                for (int m1 = lo[1]; m1 <= lo[1] + slack; ++m1)
                    for (int m2 = lo[2]; m2 <= lo[2] + slack; ++m2)
                        for (int m3 = lo[3]; m3 <= lo[3] + slack; ++m3) {
                            m = {m0, m1, m2, m3};
                            I16 af{}, am{}, aa{};
                            for (int i = 0; i < 4; ++i) {
                                af[i] = fv[i];
                                am[i] = m[i];
                                aa[i] = sup_a[i];
                            }
                            const auto rep = audit_fixed_chain(d, aa, af, am);
                            ++out.tuples;
                            if (!rep.all_pass()) ++out.counterexamples;
                        }
        };
        // all f >= 0 with f0^2 + f1^2 + f2^2 + f3^2 = 2d + 4
        for (f[0] = 0; static_cast<long long>(f[0]) * f[0] <= target; ++f[0])
            for (f[1] = 0; static_cast<long long>(f[0]) * f[0] +
                               static_cast<long long>(f[1]) * f[1] <=
                           target;
                 ++f[1])
                for (f[2] = 0; static_cast<long long>(f[0]) * f[0] +
                                   static_cast<long long>(f[1]) * f[1] +
                                   static_cast<long long>(f[2]) * f[2] <=
                               target;
                     ++f[2]) {
                    const long long rem = target -
                                          static_cast<long long>(f[0]) * f[0] -
                                          static_cast<long long>(f[1]) * f[1] -
                                          static_cast<long long>(f[2]) * f[2];
                    int r = 0;
                    while (static_cast<long long>(r) * r < rem) ++r;
                    if (static_cast<long long>(r) * r != rem) continue;
                    f[3] = r;
                    run_m(f);
                }
    }
    return out;
}

} // namespace irrmap
