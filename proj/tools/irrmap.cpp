// Command-line driver: construct the subsystem, count fibers, estimate
// degrees, compose projections, certify the plane degree, and run the exact
// integer audits.
//
// Exit codes: 0 success, 2 invariant/contract violation, 3 numerical
// failure (FiberSearchFailed, CountUnstable, RankAmbiguous).

#include "irrmap/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace irrmap;

namespace {

using ojson = nlohmann::ordered_json;

struct CommonOpts {
    std::uint64_t seed = 7;
    double tol = 1e-10;
    std::string out;
    bool json = false;
};

struct SurfaceOpts {
    int d = 1;
    std::string omega_file;
    std::string profile = "auto";
};

std::pair<int, Mat2c> resolve_surface(const SurfaceOpts& so, std::uint64_t seed) {
    if (!so.omega_file.empty()) {
        std::ifstream in(so.omega_file, std::ios::binary);
        if (!in) fail(errc::invalid_config, "cannot read " + so.omega_file);
        const std::string text(std::istreambuf_iterator<char>(in), {});
        return parse_surface_descriptor(text);
    }
    rng r(seed);
    return {so.d, random_siegel(r)};
}

RationalMapEval build_map(const SurfaceOpts& so, const CommonOpts& co, int d,
                          const Mat2c& omega) {
    const auto s = PolarizedAbelianSurface::make(d, omega);
    EvenBasis basis = even_basis(s);
    const MultiplicityProfile profile =
        so.profile == "auto" ? make_profile(d) : parse_profile(so.profile);
    const auto aud = audit_profile(d, profile.a);
    if (!aud.all_pass())
        fail(errc::profile_violation, "profile audit failed");
    const ConditionMatrix cond = condition_matrix(basis, profile);
    LinearSubsystem sub = solve_subsystem(cond, profile);
    MapTolerances mt;
    mt.newton_tol = co.tol;
    return RationalMapEval(std::move(basis), std::move(sub), mt);
}

void emit(const CommonOpts& co, const ojson& j, const std::string& human) {
    if (co.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << human;
    if (!co.out.empty()) write_report_atomic(j, co.out);
}

ojson complex_list(const Eigen::VectorXcd& v) {
    ojson out = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(ojson::array({v(i).real(), v(i).imag()}));
    return out;
}

Vec4 parse_torus_point(const std::string& csv) {
    Vec4 t;
    std::stringstream ss(csv);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i >= 4) fail(errc::invalid_config, "expected 4 torus coordinates");
        try {
            t(i++) = std::stod(item);
        } catch (const std::exception&) {
            fail(errc::invalid_config, "bad torus coordinate: " + item);
        }
    }
    if (i != 4) fail(errc::invalid_config, "expected 4 torus coordinates");
    return t;
}

std::array<int, 16> parse_mults(const std::string& csv) {
    return parse_profile(csv).a; // same shape and validation
}

void run_construct(const CommonOpts& co, const SurfaceOpts& so) {
    const auto [d, omega] = resolve_surface(so, co.seed);
    const auto m = build_map(so, co, d, omega);
    ojson j;
    j["d"] = d;
    j["omega"] = omega_to_json(omega);
    j["seed"] = co.seed;
    j["profile"] = m.subsystem().profile.a;
    j["h0_even"] = m.basis().size();
    j["dimV"] = m.subsystem().dim();
    j["N"] = m.ambient_dim();
    ojson res;
    res["condition_residual"] = m.subsystem().residual;
    res["rank_gap"] = std::min(m.subsystem().rank_gap, 1e300);
    res["tail_bound"] = m.basis().full().truncation().tail_bound;
    j["residuals"] = std::move(res);
    std::ostringstream hs;
    hs << "d = " << d << ": h0(2L)+ = " << m.basis().size() << ", dim V = "
       << m.subsystem().dim() << " (P^" << m.ambient_dim() << "), rank gap "
       << m.subsystem().rank_gap << "\n";
    emit(co, j, hs.str());
}

void run_fibers(const CommonOpts& co, const SurfaceOpts& so,
                const std::string& zcsv, int grid) {
    const auto [d, omega] = resolve_surface(so, co.seed);
    const auto m = build_map(so, co, d, omega);
    Vec4 t;
    if (zcsv.empty()) {
        rng r(sub_seed(co.seed, 11));
        t << r.uniform(), r.uniform(), r.uniform(), r.uniform();
    } else {
        t = parse_torus_point(zcsv);
    }
    const Vec2c z0 = m.surface().from_torus(t);
    const auto rep = fiber(m, z0, grid, co.tol, sub_seed(co.seed, 12));
    ojson j;
    j["d"] = d;
    j["omega"] = omega_to_json(omega);
    j["seed"] = co.seed;
    j["target_torus"] = {t(0), t(1), t(2), t(3)};
    j["target_point"] = complex_list(rep.target);
    j["count"] = rep.count;
    j["total"] = rep.total;
    j["classes"] = rep.classes;
    j["max_residual"] = rep.max_residual;
    j["grid"] = grid;
    ojson sols = ojson::array();
    for (const auto& s : rep.solutions)
        sols.push_back({s(0), s(1), s(2), s(3)});
    j["solutions"] = std::move(sols);
    j["residuals"] = rep.residuals;
    std::ostringstream hs;
    hs << "fiber count " << rep.count << " of " << rep.total
       << " slice points in " << rep.classes << " classes (max residual "
       << rep.max_residual << ")\n";
    emit(co, j, hs.str());
}

void run_degree(const CommonOpts& co, const SurfaceOpts& so, int trials,
                int grid) {
    const auto [d, omega] = resolve_surface(so, co.seed);
    const auto m = build_map(so, co, d, omega);
    const auto est = estimate_degrees(m, trials, sub_seed(co.seed, 1), grid);
    ojson j;
    j["d"] = d;
    j["omega"] = omega_to_json(omega);
    j["seed"] = co.seed;
    j["deg_phi"] = est.deg_phi;
    j["deg_S"] = est.deg_S;
    j["product"] = est.product;
    j["branch"] = branch_name(classify_case(est));
    j["stability"] = est.stability;
    j["max_residual"] = est.max_residual;
    j["n_trials"] = est.n_trials;
    j["grid"] = est.grid;
    std::ostringstream hs;
    hs << "deg phi = " << est.deg_phi << ", deg S = " << est.deg_S
       << ", product " << est.product << " (stability " << est.stability
       << ")\n";
    emit(co, j, hs.str());
}

void run_project(const CommonOpts& co, const SurfaceOpts& so, int trials,
                 int grid) {
    const auto [d, omega] = resolve_surface(so, co.seed);
    const auto m = build_map(so, co, d, omega);
    const auto est = estimate_degrees(m, trials, sub_seed(co.seed, 1), grid);
    const CaseBranch branch = classify_case(est);
    if (branch == CaseBranch::Anomalous)
        fail(errc::inconsistent_degrees,
             "anomalous degree pattern (deg_phi, deg_S) = (" +
                 std::to_string(est.deg_phi) + ", " +
                 std::to_string(est.deg_S) + ")");
    const auto nodes = node_images(m);
    const auto comp = compose_to_plane(m, branch, sub_seed(co.seed, 2));
    ojson j;
    j["d"] = d;
    j["omega"] = omega_to_json(omega);
    j["seed"] = co.seed;
    j["branch"] = branch_name(branch);
    ojson centers = ojson::array();
    for (const auto& c : comp.centers) centers.push_back(complex_list(c));
    j["projection_centers"] = std::move(centers);
    j["used_fallback_node"] = comp.used_fallback_node;
    j["node_separation"] = nodes.separation;
    j["two_to_one_dev"] = nodes.two_to_one_dev;
    std::ostringstream hs;
    hs << "branch " << branch_name(branch) << ": " << comp.centers.size()
       << " projection step(s) to the plane\n";
    emit(co, j, hs.str());
}

void run_certify(const CommonOpts& co, const SurfaceOpts& so, int trials,
                 int grid, int targets, int cgrid) {
    RunConfig cfg;
    if (!so.omega_file.empty()) {
        const auto [d, omega] = resolve_surface(so, co.seed);
        cfg.d = d;
        cfg.omega = omega;
    } else {
        cfg.d = so.d;
    }
    cfg.profile = so.profile;
    cfg.seed = co.seed;
    cfg.newton_tol = co.tol;
    cfg.degree_trials = trials;
    cfg.degree_grid = grid;
    cfg.certify_trials = targets;
    cfg.certify_grid = cgrid;
    cfg.out = co.out;
    const auto report = run_pipeline(cfg);
    if (co.json) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "final degree " << report["final_degree"] << " (branch "
                  << report["branch"].get<std::string>() << ", deg phi "
                  << report["deg_phi"] << ", deg S " << report["deg_S"]
                  << ")\n";
    }
}

void run_audit(const CommonOpts& co, const SurfaceOpts& so,
               const std::string& dmults_csv, const std::string& fmults_csv,
               const std::string& mmults_csv, int replay_d) {
    const int d = so.d;
    const MultiplicityProfile profile =
        so.profile == "auto" ? make_profile(d) : parse_profile(so.profile);

    ojson audits = ojson::array();
    auto add = [&](const AuditReport& rep) {
        for (const auto& c : rep.checks)
            audits.push_back(
                {{"name", c.name}, {"pass", c.pass}, {"lhs", c.lhs}, {"rhs", c.rhs}});
    };
    add(audit_profile(d, profile.a));

    std::array<int, 16> dm{};
    if (dmults_csv.empty())
        for (int i = 0; i < 16; ++i) dm[i] = 2 * profile.a[i];
    else
        dm = parse_mults(dmults_csv);
    add(audit_no_fixed_chain(d, profile.a, dm));

    if (fmults_csv.empty() != mmults_csv.empty())
        fail(errc::invalid_config, "--fmults and --mmults go together");
    if (!fmults_csv.empty()) {
        add(audit_fixed_chain(d, profile.a, parse_mults(fmults_csv),
                              parse_mults(mmults_csv)));
    } else {
        const auto fsq = four_squares(2 * d + 4);
        std::array<int, 16> f_canon{};
        for (int k = 0; k < 4; ++k) f_canon[4 + k] = fsq[k];
        add(audit_fixed_chain(d, profile.a, f_canon, dm));
    }

    if (replay_d > 0) {
        const auto replay = replay_fixed_component_bound(replay_d);
        audits.push_back({{"name", "fixed_branch_replay"},
                          {"pass", replay.counterexamples == 0},
                          {"lhs", replay.counterexamples},
                          {"rhs", 0}});
    }

    ojson j;
    j["d"] = d;
    j["profile"] = profile.a;
    j["audits"] = audits;
    bool all = true;
    std::ostringstream hs;
    for (const auto& entry : audits) {
        const bool pass = entry["pass"].get<bool>();
        all = all && pass;
        hs << (pass ? "pass" : "FAIL") << "  "
           << entry["name"].get<std::string>() << "  lhs=" << entry["lhs"]
           << " rhs=" << entry["rhs"] << "\n";
    }
    emit(co, j, hs.str());
    if (!all) fail(errc::invalid_audit_input, "audit checks failed");
}

void run_foursquares(const CommonOpts& co, int n) {
    const auto sq = four_squares(n);
    ojson j;
    j["n"] = n;
    j["squares"] = sq;
    std::ostringstream hs;
    hs << n << " = " << sq[0] << "^2 + " << sq[1] << "^2 + " << sq[2]
       << "^2 + " << sq[3] << "^2\n";
    emit(co, j, hs.str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"degree-4 plane maps from (1,d)-polarized abelian surfaces"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts co;
    app.add_option("--seed", co.seed, "random seed")->capture_default_str();
    app.add_option("--tol", co.tol, "Newton residual tolerance")
        ->capture_default_str();
    app.add_option("--out", co.out, "write the JSON result to this path");
    app.add_flag("--json", co.json, "machine-readable standard output");

    SurfaceOpts so;
    int grid = 16, trials = 5, targets = 20, cgrid = 12, replay_d = 10;
    int fsq_n = 0;
    std::string zcsv, dmults_csv, fmults_csv, mmults_csv;

    const auto add_surface = [&](CLI::App* sub, bool with_profile = true) {
        sub->add_option("--d", so.d, "polarization type (1, d)")
            ->capture_default_str();
        sub->add_option("--omega", so.omega_file,
                        "surface descriptor JSON file (overrides --d)");
        if (with_profile)
            sub->add_option("--profile", so.profile,
                            "multiplicity profile: auto or 16 CSV weights")
                ->capture_default_str();
    };

    auto* c_construct =
        app.add_subcommand("construct", "build the linear subsystem");
    add_surface(c_construct);
    c_construct->callback([&] { run_construct(co, so); });

    auto* c_fibers = app.add_subcommand("fibers", "count one fiber of the map");
    add_surface(c_fibers);
    c_fibers->add_option("--z", zcsv, "target torus coordinates t1,t2,t3,t4");
    c_fibers->add_option("--grid", grid, "Newton seeds per torus dimension")
        ->capture_default_str();
    c_fibers->callback([&] { run_fibers(co, so, zcsv, grid); });

    auto* c_degree =
        app.add_subcommand("degree", "estimate deg phi and deg S");
    add_surface(c_degree);
    c_degree->add_option("--trials", trials, "number of random fiber targets")
        ->capture_default_str();
    c_degree->add_option("--grid", grid, "Newton seeds per torus dimension")
        ->capture_default_str();
    c_degree->callback([&] { run_degree(co, so, trials, grid); });

    auto* c_project =
        app.add_subcommand("project", "compose projections down to the plane");
    add_surface(c_project);
    c_project->add_option("--trials", trials, "degree-estimation targets")
        ->capture_default_str();
    c_project->add_option("--grid", grid, "Newton seeds per torus dimension")
        ->capture_default_str();
    c_project->callback([&] { run_project(co, so, trials, grid); });

    auto* c_certify = app.add_subcommand(
        "certify", "full pipeline: construct, measure, project, certify, audit");
    add_surface(c_certify);
    c_certify->add_option("--trials", trials, "degree-estimation targets")
        ->capture_default_str();
    c_certify->add_option("--grid", grid, "degree-estimation seed grid")
        ->capture_default_str();
    c_certify->add_option("--targets", targets, "plane targets for certification")
        ->capture_default_str();
    c_certify
        ->add_option("--certify-grid", cgrid, "certification seed grid")
        ->capture_default_str();
    c_certify->callback(
        [&] { run_certify(co, so, trials, grid, targets, cgrid); });

    auto* c_audit =
        app.add_subcommand("audit", "exact integer inequality checks");
    add_surface(c_audit);
    c_audit->add_option("--dmults", dmults_csv,
                        "divisor multiplicities (default 2a)");
    c_audit->add_option("--fmults", fmults_csv, "fixed-part multiplicities");
    c_audit->add_option("--mmults", mmults_csv, "movable-part multiplicities");
    c_audit
        ->add_option("--replay", replay_d,
                     "exhaustive fixed-branch replay up to this d (0 = skip)")
        ->capture_default_str();
    c_audit->callback([&] {
        run_audit(co, so, dmults_csv, fmults_csv, mmults_csv, replay_d);
    });

    auto* c_foursq = app.add_subcommand(
        "foursquares", "decompose n into four squares (largest-first)");
    c_foursq->add_option("n", fsq_n, "nonnegative integer")->required();
    c_foursq->callback([&] { run_foursquares(co, fsq_n); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what()
                  << "\n";
        return errc_is_numerical(e.code()) ? 3 : 2;
    }
    return 0;
}
