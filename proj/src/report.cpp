#include "irrmap/report.hpp"

#include <Eigen/Core>
#include <filesystem>
#include <fstream>

namespace irrmap {

namespace {

using ojson = nlohmann::ordered_json;

ojson complex_to_json(const cdouble& w) {
    return ojson::array({w.real(), w.imag()});
}

void append_checks(ojson& audits, const AuditReport& rep) {
    for (const auto& c : rep.checks) {
        ojson entry;
        entry["name"] = c.name;
        entry["pass"] = c.pass;
        entry["lhs"] = c.lhs;
        entry["rhs"] = c.rhs;
        audits.push_back(std::move(entry));
    }
}

std::string first_failure(const AuditReport& rep) {
    for (const auto& c : rep.checks)
        if (!c.pass) return c.name;
    return {};
}

// largest odd-degree Taylor coefficient of the even sections relative to the
// largest coefficient at the same two-torsion point, maximized over all 16
double odd_taylor_max(const EvenBasis& basis) {
    double worst = 0.0;
    for (const auto& pt : basis.surface().two_torsion()) {
        const TaylorTable table = basis.eval_taylor(pt, 3);
        double scale = 0.0, odd = 0.0;
        for (int f = 0; f < table.functions(); ++f)
            for (int deg = 0; deg <= 3; ++deg)
                for (const cdouble& c : table.slice(f, deg)) {
                    scale = std::max(scale, std::abs(c));
                    if (deg % 2 == 1) odd = std::max(odd, std::abs(c));
                }
        if (scale > 0.0) worst = std::max(worst, odd / scale);
    }
    return worst;
}

} // namespace

Mat2c omega_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        fail(errc::invalid_config, "omega must be a 2x2 array of [re, im] pairs");
    Mat2c omega;
    for (int r = 0; r < 2; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != 2)
            fail(errc::invalid_config, "omega must be a 2x2 array of [re, im] pairs");
        for (int c = 0; c < 2; ++c) {
            const auto& cell = row[c];
            if (!cell.is_array() || cell.size() != 2 ||
                !cell[0].is_number() || !cell[1].is_number())
                fail(errc::invalid_config,
                     "omega entries must be [re, im] number pairs");
            omega(r, c) = cdouble(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    return omega;
}

nlohmann::ordered_json omega_to_json(const Mat2c& omega) {
    ojson rows = ojson::array();
    for (int r = 0; r < 2; ++r) {
        ojson row = ojson::array();
        for (int c = 0; c < 2; ++c) row.push_back(complex_to_json(omega(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::pair<int, Mat2c> parse_surface_descriptor(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::invalid_config,
             std::string("surface descriptor is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("d") || !j.contains("omega"))
        fail(errc::invalid_config, "surface descriptor needs keys d and omega");
    if (!j["d"].is_number_integer() || j["d"].get<int>() < 1)
        fail(errc::invalid_config, "d must be a positive integer");
    return {j["d"].get<int>(), omega_from_json(j["omega"])};
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

nlohmann::ordered_json run_pipeline(const RunConfig& cfg) {
    if (cfg.d < 1) fail(errc::invalid_config, "d must be a positive integer");

    rng omega_rng(cfg.seed);
    const Mat2c omega = cfg.omega ? *cfg.omega : random_siegel(omega_rng);
    const auto s = PolarizedAbelianSurface::make(cfg.d, omega);
    EvenBasis basis = even_basis(s);

    const MultiplicityProfile profile =
        cfg.profile == "auto" ? make_profile(cfg.d) : parse_profile(cfg.profile);

    ojson audits = ojson::array();
    const AuditReport aud_profile = audit_profile(cfg.d, profile.a);
    append_checks(audits, aud_profile);
    if (!aud_profile.all_pass())
        fail(errc::profile_violation,
             "profile audit failed: " + first_failure(aud_profile));

    const ConditionMatrix cond = condition_matrix(basis, profile);
    LinearSubsystem sub = solve_subsystem(cond, profile);

    MapTolerances mt;
    mt.newton_tol = cfg.newton_tol;
    const RationalMapEval m(basis, std::move(sub), mt);

    const DegreeEstimate est =
        estimate_degrees(m, cfg.degree_trials, sub_seed(cfg.seed, 1), cfg.degree_grid);
    const CaseBranch branch = classify_case(est);
    if (branch == CaseBranch::Anomalous)
        fail(errc::inconsistent_degrees,
             "anomalous degree pattern (deg_phi, deg_S) = (" +
                 std::to_string(est.deg_phi) + ", " + std::to_string(est.deg_S) +
                 ")");

    const NodeImages nodes = node_images(m);
    ComposedMap comp = compose_to_plane(m, branch, sub_seed(cfg.seed, 2));
    Certification cert;
    try {
        cert = certify_final_degree(m, comp, cfg.certify_trials,
                                    sub_seed(cfg.seed, 3), cfg.certify_grid);
    } catch (const error& e) {
        // cone-point caveat: retry the node projection through the other node
        const bool retriable = branch == CaseBranch::TwoFour &&
                               !comp.used_fallback_node &&
                               (e.code() == errc::measured_degree_two ||
                                e.code() == errc::count_unstable);
        if (!retriable) throw;
        comp = compose_to_plane(m, branch, sub_seed(cfg.seed, 2), true);
        cert = certify_final_degree(m, comp, cfg.certify_trials,
                                    sub_seed(cfg.seed, 3), cfg.certify_grid);
    }

    // integer audit suite: boundary instance of the movable bound, a
    // canonical admissible fixed split, and the exhaustive replay
    std::array<int, 16> doubled{};
    for (int i = 0; i < 16; ++i) doubled[i] = 2 * profile.a[i];
    const AuditReport aud_movable = audit_no_fixed_chain(cfg.d, profile.a, doubled);
    append_checks(audits, aud_movable);

    const auto fsq = four_squares(2 * cfg.d + 4);
    std::array<int, 16> f_canon{};
    for (int k = 0; k < 4; ++k) f_canon[4 + k] = fsq[k];
    const AuditReport aud_fixed =
        audit_fixed_chain(cfg.d, profile.a, f_canon, doubled);
    append_checks(audits, aud_fixed);

    const ReplayResult replay = replay_fixed_component_bound(10);
    {
        ojson entry;
        entry["name"] = "fixed_branch_replay";
        entry["pass"] = replay.counterexamples == 0;
        entry["lhs"] = replay.counterexamples;
        entry["rhs"] = 0;
        audits.push_back(std::move(entry));
    }

    ojson report;
    report["d"] = cfg.d;
    report["omega"] = omega_to_json(omega);
    report["seed"] = cfg.seed;
    report["profile"] = profile.a;
    report["dimV"] = m.subsystem().dim();
    report["N"] = m.ambient_dim();
    report["deg_phi"] = est.deg_phi;
    report["deg_S"] = est.deg_S;
    report["branch"] = branch_name(branch);
    {
        ojson centers = ojson::array();
        for (const auto& c : comp.centers) {
            ojson coords = ojson::array();
            for (Eigen::Index i = 0; i < c.size(); ++i)
                coords.push_back(complex_to_json(c(i)));
            centers.push_back(std::move(coords));
        }
        report["projection_centers"] = std::move(centers);
    }
    report["final_degree"] = cert.final_degree;
    {
        ojson res;
        res["condition_residual"] = m.subsystem().residual;
        res["rank_gap"] = std::min(m.subsystem().rank_gap, 1e300);
        res["tail_bound"] = m.basis().full().truncation().tail_bound;
        res["newton_max_residual"] = std::max(est.max_residual, cert.max_residual);
        res["odd_taylor_max"] = odd_taylor_max(m.basis());
        res["node_separation"] = nodes.separation;
        res["two_to_one_dev"] = nodes.two_to_one_dev;
        res["degree_stability"] = est.stability;
        res["certify_stability"] = cert.stability;
        report["residuals"] = std::move(res);
    }
    report["audits"] = std::move(audits);
    {
        ojson versions;
        versions["irrmap"] = "1.0.0";
        versions["report_schema"] = 1;
        versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION);
        versions["kernel_backend"] = kern::name(kern::active());
        report["versions"] = std::move(versions);
    }

    if (!cfg.out.empty()) write_report_atomic(report, cfg.out);

    for (const auto& entry : report["audits"])
        if (!entry["pass"].get<bool>())
            fail(errc::invalid_audit_input,
                 "audit check failed: " + entry["name"].get<std::string>());
    return report;
}

std::string serialize_report(const nlohmann::ordered_json& report) {
    return report.dump(2) + "\n";
}

void write_report_atomic(const nlohmann::ordered_json& report,
                         const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::invalid_config, "cannot open " + tmp + " for writing");
        out << serialize_report(report);
        if (!out) fail(errc::invalid_config, "short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        fail(errc::invalid_config,
             "cannot move report into place: " + ec.message());
}

} // namespace irrmap
