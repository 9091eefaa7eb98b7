#pragma once

#include <stdexcept>
#include <string>

namespace irrmap {

/// Failure classes surfaced by the pipeline. Codes in the `numerical`
/// group indicate that a measurement could not be stabilized (CLI exit 3);
/// the rest are contract or invariant violations (CLI exit 2).
enum class errc {
    invalid_period_matrix,
    dimension_mismatch,
    parity_violation,
    subsystem_too_small,
    rank_ambiguous,
    fiber_search_failed,
    count_unstable,
    inconsistent_degrees,
    degree_bound_violated,
    profile_violation,
    bad_center,
    measured_degree_two,
    invalid_audit_input,
    invalid_config,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_period_matrix: return "InvalidPeriodMatrix";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::parity_violation: return "ParityViolation";
        case errc::subsystem_too_small: return "SubsystemTooSmall";
        case errc::rank_ambiguous: return "RankAmbiguous";
        case errc::fiber_search_failed: return "FiberSearchFailed";
        case errc::count_unstable: return "CountUnstable";
        case errc::inconsistent_degrees: return "InconsistentDegrees";
        case errc::degree_bound_violated: return "DegreeBoundViolated";
        case errc::profile_violation: return "ProfileViolation";
        case errc::bad_center: return "BadCenter";
        case errc::measured_degree_two: return "MeasuredDegreeTwo";
        case errc::invalid_audit_input: return "InvalidAuditInput";
        case errc::invalid_config: return "InvalidConfig";
    }
    return "UnknownError";
}

/// True for failures of the numerical machinery (root finding, rank
/// decisions) as opposed to violated preconditions or invariants.
inline bool errc_is_numerical(errc c) {
    switch (c) {
        case errc::rank_ambiguous:
        case errc::fiber_search_failed:
        case errc::count_unstable:
            return true;
        default:
            return false;
    }
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace irrmap
