#include "cli.hpp"

#include "mixedgreen/io.hpp"
#include "mixedgreen/manufactured.hpp"
#include "mixedgreen/studies.hpp"
#include "mixedgreen/verifiers.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace mixedgreen::cli {

namespace fs = std::filesystem;

namespace {

/// Uniform bound on the Poincaré–Sobolev ratio over the sweep.
constexpr double kPoincareBound = 32.0;

struct Options {
    std::string domain;
    double mesh_h = 1.0 / 32.0;
    int refine = 0;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::vector<std::string> checks;
    std::string config;
    std::string load;
    std::vector<std::string> poles;
    int grading = 3;
};

/// Inputs read once; their bytes feed the report hash.
struct Inputs {
    DomainSpec spec;
    std::string hash;
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const std::string& item : items) {
        std::stringstream s(item);
        std::string part;
        while (std::getline(s, part, ','))
            if (!part.empty()) out.push_back(part);
    }
    return out;
}

Vec2 parse_point(const std::string& text) {
    std::stringstream s(text);
    double x = 0, y = 0;
    char comma = 0;
    if (!(s >> x >> comma >> y) || comma != ',' || !(s >> std::ws).eof())
        throw InvalidInput("point must be written as x,y: \"" + text + "\"");
    return {x, y};
}

/// Fills options not given on the command line from the --config JSON file.
void merge_config(Options& o, const CLI::App& cmd) {
    if (o.config.empty()) return;
    const fs::path base = fs::path(o.config).parent_path();
    Json j;
    try {
        j = Json::parse(read_file(o.config));
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object()) throw InvalidInput("config must hold a JSON object");
    const auto unset = [&cmd](const char* flag) { return cmd.get_option(flag)->count() == 0; };
    const auto path = [&base](const Json& v) { return (base / v.get<std::string>()).string(); };
    static const std::set<std::string> known{"domain", "mesh_h", "refine", "seed", "out",
                                             "check", "load",   "poles",  "grading"};
    try {
        for (const auto& [key, value] : j.items())
            if (!known.contains(key)) throw InvalidInput("unknown config key \"" + key + "\"");
        if (j.contains("domain") && unset("--domain")) o.domain = path(j["domain"]);
        if (j.contains("mesh_h") && unset("--mesh-h")) o.mesh_h = j["mesh_h"].get<double>();
        if (j.contains("refine") && unset("--refine")) o.refine = j["refine"].get<int>();
        if (j.contains("seed") && unset("--seed")) o.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out") && unset("--out")) o.out = path(j["out"]);
        if (j.contains("check") && unset("--check")) {
            o.checks = j["check"].is_array() ? j["check"].get<std::vector<std::string>>()
                                             : std::vector<std::string>{j["check"].get<std::string>()};
        }
        if (j.contains("load") && cmd.get_option_no_throw("--load") && unset("--load")) o.load = path(j["load"]);
        if (j.contains("grading") && cmd.get_option_no_throw("--grading") && unset("--grading"))
            o.grading = j["grading"].get<int>();
        if (j.contains("poles") && cmd.get_option_no_throw("--pole") && unset("--pole")) {
            o.poles.clear();
            for (const auto& p : j["poles"])
                o.poles.push_back(std::to_string(p.at(0).get<double>()) + "," + std::to_string(p.at(1).get<double>()));
        }
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed config: ") + e.what());
    }
}

Inputs read_inputs(const Options& o, const std::vector<std::string>& extra_files = {}) {
    if (o.domain.empty()) throw InvalidInput("--domain is required");
    if (!(o.mesh_h > 0.0)) throw InvalidInput("--mesh-h must be positive");
    if (o.refine < 0) throw InvalidInput("--refine must be nonnegative");
    std::string bytes = read_file(o.domain);
    Inputs in{parse_domain_text(bytes), {}};
    for (const std::string& f : extra_files) bytes += read_file(f);
    in.hash = sha256_hex(bytes);
    return in;
}

double effective_h(const Options& o) { return o.mesh_h / std::exp2(o.refine); }

Json mesh_json(const TriangleMesh& mesh) {
    return {{"h", mesh.h()},
            {"nodes", mesh.num_nodes()},
            {"triangles", mesh.num_triangles()},
            {"min_angle_degrees", mesh.min_angle_degrees()}};
}

Json report_header(const char* command, const Options& o, const Inputs& in) {
    Json j;
    j["command"] = command;
    j["domain"] = in.spec.name;
    j["input_sha256"] = in.hash;
    j["mesh_h"] = o.mesh_h;
    j["refine"] = o.refine;
    j["seed"] = o.seed;
    j["solver_tolerance"] = kSolveTolerance;
    return j;
}

Json verification(const std::string& check, Json parameters, double constant, std::optional<double> exponent,
                  bool pass, std::uint64_t seed) {
    Json j;
    j["check"] = check;
    j["parameters"] = std::move(parameters);
    j["constant"] = constant;
    j["exponent"] = exponent ? Json(*exponent) : Json(nullptr);
    j["pass"] = pass;
    j["seed"] = seed;
    return j;
}

std::function<Vec2(const Vec2&)> constant_vector(const Json& v) {
    if (!v.is_array() || v.size() != 2) throw InvalidInput("vector load must be [a, b]");
    const Vec2 c(v[0].get<double>(), v[1].get<double>());
    return [c](const Vec2&) { return c; };
}

Loads parse_loads(const std::string& path) {
    Loads loads;
    if (path.empty()) return loads;
    try {
        const Json j = Json::parse(read_file(path));
        if (!j.is_object()) throw InvalidInput("load spec must hold a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "body_force") {
                loads.body_force = constant_vector(value);
            } else if (key == "divergence") {
                const double g = value.get<double>();
                loads.divergence = [g](const Vec2&) { return g; };
            } else if (key == "traction") {
                const auto t = constant_vector(value);
                loads.traction = [t](const Vec2& y, const Vec2&) { return t(y); };
            } else if (key == "dirichlet") {
                loads.dirichlet = constant_vector(value);
            } else {
                throw InvalidInput("unknown load key \"" + key + "\"");
            }
        }
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed load spec: ") + e.what());
    }
    return loads;
}

std::shared_ptr<FESpace> make_space(const DomainSpec& spec, double h) {
    return std::make_shared<FESpace>(std::make_shared<TriangleMesh>(triangulate(*spec.domain, *spec.decomposition, h)));
}

void require_dirichlet_opening(const DomainSpec& spec) {
    if (!opening_check(*spec.domain, *spec.decomposition).d_open())
        throw NumericalFailure("D contains no boundary interval of radius R0/M; rigid motions are not excluded", "DOpen");
}

// -- solve ------------------------------------------------------------------

int cmd_solve(const Options& o, std::ostream& out) {
    const Inputs in = read_inputs(o, o.load.empty() ? std::vector<std::string>{} : std::vector{o.load});
    require_dirichlet_opening(in.spec);
    const fs::path dir(o.out);
    Json report = report_header("solve", o, in);
    const auto checks = split_list(o.checks);
    if (std::find(checks.begin(), checks.end(), "mms") != checks.end()) {
        const ExactSolution exact = trigonometric_solution();
        std::vector<double> hs, eu, ep;
        std::string csv = "h,velocity_h1_error,velocity_l2_error,pressure_l2_error,velocity_residual,pressure_residual\n";
        report["levels"] = Json::array();
        for (int k = 0; k <= o.refine; ++k) {
            const auto space = make_space(in.spec, o.mesh_h / std::exp2(k));
            const StokesSolution s = StokesProblem(space).solve(exact_loads(exact));
            const DiscretizationErrors e = discretization_errors(s, exact);
            hs.push_back(space->mesh().h());
            eu.push_back(e.velocity_h1);
            ep.push_back(e.pressure_l2);
            csv += format_double(space->mesh().h()) + ',' + format_double(e.velocity_h1) + ',' +
                   format_double(e.velocity_l2) + ',' + format_double(e.pressure_l2) + ',' +
                   format_double(s.velocity_residual) + ',' + format_double(s.pressure_residual) + '\n';
            report["levels"].push_back({{"mesh", mesh_json(space->mesh())},
                                        {"velocity_h1_error", e.velocity_h1},
                                        {"pressure_l2_error", e.pressure_l2},
                                        {"velocity_residual", s.velocity_residual},
                                        {"pressure_residual", s.pressure_residual}});
        }
        if (hs.size() >= 2) {
            report["velocity_rate"] = fitted_rate(hs, eu);
            report["pressure_rate"] = fitted_rate(hs, ep);
        }
        write_atomic(dir / "mms.csv", csv);
        write_atomic(dir / "report.json", dump_json(report));
        out << "mms: " << hs.size() << " levels written to " << (dir / "mms.csv").string() << '\n';
        return kExitOk;
    }
    const auto space = make_space(in.spec, effective_h(o));
    const StokesProblem problem(space);
    const StokesSolution s = problem.solve(parse_loads(o.load));
    report["mesh"] = mesh_json(space->mesh());
    report["velocity_dofs"] = space->num_velocity_dofs();
    report["pressure_dofs"] = space->num_pressure_dofs();
    report["pressure_normalized"] = problem.pressure_pinned();
    report["velocity_residual"] = s.velocity_residual;
    report["pressure_residual"] = s.pressure_residual;
    write_atomic(dir / "field.csv", field_csv(s.u, s.p));
    std::ostringstream mesh_text;
    space->mesh().write(mesh_text);
    write_atomic(dir / "mesh.txt", mesh_text.str());
    write_atomic(dir / "report.json", dump_json(report));
    out << "solve: residuals " << format_double(s.velocity_residual) << ' ' << format_double(s.pressure_residual)
        << ", fields written to " << (dir / "field.csv").string() << '\n';
    return kExitOk;
}

// -- green ------------------------------------------------------------------

int cmd_green(const Options& o, std::ostream& out) {
    const Inputs in = read_inputs(o);
    require_dirichlet_opening(in.spec);
    std::vector<Vec2> poles;
    for (const std::string& p : o.poles) poles.push_back(parse_point(p));
    if (poles.empty()) {
        const auto box = in.spec.domain->bounding_box();
        poles.push_back(0.5 * (box[0] + box[1]));
    }
    static const std::vector<std::string> all{"symmetry", "logbound", "weak", "holder", "representation"};
    std::vector<std::string> checks = split_list(o.checks);
    if (checks.empty()) checks = all;
    for (const std::string& c : checks)
        if (std::find(all.begin(), all.end(), c) == all.end()) throw InvalidInput("unknown green check \"" + c + "\"");
    if (o.grading < 0) throw InvalidInput("--grading must be nonnegative");

    GreenOptions go;
    go.h = effective_h(o);
    go.grading_levels = o.grading;
    const GreenFunction green(*in.spec.decomposition, poles, go);
    Json report = report_header("green", o, in);
    report["mesh"] = mesh_json(green.space().mesh());
    report["grading_levels"] = o.grading;
    report["poles"] = Json::array();
    for (std::size_t i = 0; i < poles.size(); ++i) {
        report["poles"].push_back({{"x", {poles[i].x(), poles[i].y()}},
                                   {"local_h", green.local_h(i)},
                                   {"mollifier_radius", green.mollifier_radius(i)},
                                   {"near_boundary", green.column(i, 0).near_boundary}});
    }
    Json results = Json::array();
    const auto has = [&checks](const char* c) { return std::find(checks.begin(), checks.end(), c) != checks.end(); };

    if (has("symmetry")) {
        Json table = Json::array();
        double worst = 0.0;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            for (std::size_t j = i + 1; j < poles.size(); ++j) {
                const auto [abs_defect, rel_defect] = green.symmetry_defect(i, j);
                const double sep = (poles[i] - poles[j]).norm();
                table.push_back({{"x", i}, {"y", j}, {"separation", sep}, {"defect", abs_defect}, {"relative", rel_defect}});
                if (sep >= 0.25) worst = std::max(worst, rel_defect);
            }
        }
        Json v = verification("green_symmetry", {{"pairs", table.size()}}, worst, std::nullopt, worst <= 0.05, o.seed);
        v["table"] = std::move(table);
        results.push_back(std::move(v));
    }
    if (has("logbound")) {
        for (std::size_t i = 0; i < poles.size(); ++i) {
            const LogBoundSweep s = log_bound_sweep(green, i);
            Json pairs = Json::array();
            for (std::size_t k = 0; k < s.r.size(); ++k) pairs.push_back({s.r[k], s.max_G[k]});
            const bool pass = s.fit.r2 >= 0.95 && s.fit.slope >= 0.04 && s.fit.slope <= 0.16;
            Json v = verification("green_logbound", {{"pole", i}, {"r2", s.fit.r2}}, s.fit.intercept, s.fit.slope,
                                  pass, o.seed);
            v["r_maxG"] = std::move(pairs);
            results.push_back(std::move(v));
        }
    }
    if (has("weak")) {
        double lo = kInfinity, hi = 0.0;
        Json per = Json::array();
        for (std::size_t i = 0; i < poles.size(); ++i) {
            const GreenLorentzNorms n = green_weak_norms(green, i);
            per.push_back({{"pole", i}, {"gradient", n.gradient}, {"pressure", n.pressure}});
            lo = std::min({lo, n.gradient, n.pressure});
            hi = std::max({hi, n.gradient, n.pressure});
        }
        Json v = verification("green_weak_l2", {{"poles", poles.size()}}, hi, std::nullopt, hi <= 3.0 * lo, o.seed);
        v["norms"] = std::move(per);
        results.push_back(std::move(v));
    }
    if (has("holder")) {
        for (std::size_t i = 0; i < poles.size(); ++i) {
            const Exclusion ex = pole_exclusion(green, i);
            const double rho = in.spec.domain->diameter() / 32.0;
            const std::vector<Vec2> centers = sweep_centers(*in.spec.domain, 4.0 * rho, rho, ex);
            if (centers.empty()) continue;
            const HolderReport h = local_holder_check(green.column(i, 0).G, *in.spec.domain, centers, rho, 200, o.seed, ex);
            results.push_back(verification("green_holder",
                                           {{"pole", i}, {"rho", rho}, {"centers", centers.size()}, {"pairs", h.pairs},
                                            {"mvt_constant", h.mvt_constant}},
                                           h.constant, h.gamma, h.gamma >= 0.1 && std::isfinite(h.mvt_constant), o.seed));
        }
    }
    if (has("representation")) {
        const auto box = in.spec.domain->bounding_box();
        const Vec2 center = 0.5 * (box[0] + box[1]);
        for (const auto load : {RepresentationLoad::BodyForce, RepresentationLoad::Divergence}) {
            const RepresentationComparison c = representation_check(green, load, center);
            results.push_back(verification(
                "green_representation",
                {{"load", load == RepresentationLoad::BodyForce ? "body_force" : "divergence"}, {"poles", poles.size()}},
                c.relative_l2, std::nullopt, c.relative_l2 <= 0.05, o.seed));
        }
    }
    std::vector<GreenSample> samples;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const std::vector<Vec2> probes = default_probes(green, i);
        const std::vector<GreenSample> s = sample_green(green, i, probes);
        samples.insert(samples.end(), s.begin(), s.end());
    }
    bool pass = true;
    for (const Json& r : results) pass = pass && r["pass"].get<bool>();
    report["checks"] = std::move(results);
    report["pass"] = pass;
    const fs::path dir(o.out);
    write_atomic(dir / "green_sweep.csv", green_sweep_csv(samples));
    write_atomic(dir / "green_report.json", dump_json(report));
    out << "green: " << report["checks"].size() << " checks, " << (pass ? "all pass" : "some fail") << '\n';
    return kExitOk;
}

// -- verify -----------------------------------------------------------------

int cmd_verify(const Options& o, std::ostream& out) {
    const Inputs in = read_inputs(o);
    const PolygonalDomain& domain = *in.spec.domain;
    const BoundaryDecomposition& dec = *in.spec.decomposition;
    const double R0 = domain.scale_R0();
    const fs::path dir(o.out);
    Json report = report_header("verify", o, in);
    Json results = Json::array();

    // Ahlfors–David regularity of D.
    if (dec.has_dirichlet()) {
        const auto scales = default_ahlfors_david_scales(domain);
        const AhlforsDavidReport ad = ahlfors_david_check(domain, dec, scales);
        results.push_back(verification("ahlfors_david",
                                       {{"M", ad.M}, {"samples", ad.samples}, {"scales", scales.size()},
                                        {"min_ratio", ad.min_ratio}, {"max_ratio", ad.max_ratio},
                                        {"min_dirichlet_ratio", ad.min_dirichlet_ratio}},
                                       ad.min_dirichlet_ratio, std::nullopt, ad.pass, o.seed));
    } else {
        Json v = verification("ahlfors_david", {{"M", domain.lipschitz_M()}}, 0.0, std::nullopt, false, o.seed);
        v["hypothesis"] = "DOpen";
        results.push_back(std::move(v));
    }

    const OpeningReport op = opening_check(domain, dec);
    results.push_back(verification("opening_dirichlet",
                                   {{"radius", R0 / domain.lipschitz_M()}, {"largest_run", op.dirichlet.largest_run}},
                                   op.dirichlet.radius, std::nullopt, op.d_open(), o.seed));
    results.push_back(verification("opening_neumann",
                                   {{"radius", R0 / domain.lipschitz_M()}, {"largest_run", op.neumann.largest_run}},
                                   op.neumann.radius, std::nullopt, op.n_open(), o.seed));

    const auto space = make_space(in.spec, effective_h(o));
    report["mesh"] = mesh_json(space->mesh());
    const StokesProblem problem(space);

    // Korn.
    const KornReport k = korn_constant(problem);
    Json korn = verification("korn",
                             {{"dual_C", k.dual_C}, {"dual_constant", k.dual_constant}, {"tolerance", 1e-8}},
                             k.constant, std::nullopt, k.hypothesis_ok && k.constant > 0.0, o.seed);
    if (!k.hypothesis_ok) {
        korn["hypothesis"] = "DOpen";
        if (k.rigid_witness) {
            korn["rigid_witness"] = {{"field", "(-y2, y1)"}, {"rayleigh_quotient", *k.rigid_witness}};
        }
    }
    results.push_back(std::move(korn));

    // Poincaré–Sobolev on a smooth random field vanishing on D.
    {
        const VelocityField u = smooth_random_field(space, dec, o.seed);
        const std::vector<double> radii{R0 / 4, R0 / 8, R0 / 16};
        const std::vector<Vec2> centers = sweep_centers(domain, R0 / 2, R0 / 4, std::nullopt);
        const SweepReport ps = poincare_sobolev_check(u, dec, centers, radii, 1.5);
        Json per = Json::array();
        for (const double r : radii) per.push_back({r, ps.worst_at(r)});
        const double worst = ps.worst();
        Json v = verification("poincare_sobolev", {{"q", 1.5}, {"centers", centers.size()}, {"bound", kPoincareBound}},
                              worst, std::nullopt, std::isfinite(worst) && worst <= kPoincareBound, o.seed);
        v["worst_by_radius"] = std::move(per);
        results.push_back(std::move(v));
    }

    // Divergence right inverse.
    try {
        const BogovskiiSolver bog(space, dec, R0);
        std::mt19937_64 rng(o.seed);
        std::normal_distribution<double> normal;
        const double a = normal(rng), b = normal(rng), c = normal(rng);
        const Vector f = bog.sample([a, b, c](const Vec2& y) { return 1.0 + a * std::sin(3 * y.x()) + b * y.y() + c * y.x() * y.y(); });
        const Json chain = chain_report(bog, f);
        write_atomic(dir / "chain.json", dump_json(chain));
        const Json& t = chain["totals"];
        const bool pass = t["divergence_residual"].get<double>() <= 1e-8 && t["dirichlet_trace"].get<double>() <= 1e-12;
        results.push_back(verification("bogovskii",
                                       {{"R0", R0}, {"links", chain["links"].size()},
                                        {"divergence_residual", t["divergence_residual"]},
                                        {"dirichlet_trace", t["dirichlet_trace"]}, {"neumann_flux", t["neumann_flux"]}},
                                       t["stability"].get<double>(), std::nullopt, pass, o.seed));
    } catch (const NumericalFailure& e) {
        Json v = verification("bogovskii", {{"R0", R0}}, 0.0, std::nullopt, false, o.seed);
        v["hypothesis"] = e.hypothesis();
        v["message"] = e.what();
        results.push_back(std::move(v));
    }

    bool pass = true;
    for (const Json& r : results) pass = pass && r["pass"].get<bool>();
    report["checks"] = std::move(results);
    report["pass"] = pass;
    write_atomic(dir / "verify_report.json", dump_json(report));
    for (const Json& r : report["checks"])
        out << (r["pass"].get<bool>() ? "PASS " : "FAIL ") << r["check"].get<std::string>() << '\n';
    return kExitOk;
}

void add_common(CLI::App& cmd, Options& o) {
    cmd.add_option("--domain", o.domain, "Domain JSON file");
    cmd.add_option("--mesh-h", o.mesh_h, "Target mesh size");
    cmd.add_option("--refine", o.refine, "Uniform halvings of the mesh size (levels for --check mms)");
    cmd.add_option("--seed", o.seed, "Random seed");
    cmd.add_option("--out", o.out, "Output directory");
    cmd.add_option("--check", o.checks, "Checks to run (comma separated)")->delimiter(',');
    cmd.add_option("--config", o.config, "JSON file with any of the options above");
}

void diagnostic(std::ostream& err, const char* kind, const std::string& message, const std::string& hypothesis = {}) {
    Json j{{"status", "error"}, {"kind", kind}, {"message", message}};
    if (!hypothesis.empty()) j["hypothesis"] = hypothesis;
    err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mixed Dirichlet/traction Stokes problems on polygons: solver, Green function, verifiers"};
    app.require_subcommand(1);
    Options o;
    CLI::App* solve = app.add_subcommand("solve", "Solve with constant loads, or run the manufactured-solution study");
    add_common(*solve, o);
    solve->add_option("--load", o.load, "Load JSON: body_force, divergence, traction, dirichlet (constants)");
    CLI::App* green = app.add_subcommand("green", "Green function sweeps and estimates");
    add_common(*green, o);
    green->add_option("--pole", o.poles, "Pole x,y (repeatable)");
    green->add_option("--grading", o.grading, "Graded refinement levels toward the poles");
    CLI::App* verify = app.add_subcommand("verify", "Geometry, Korn, Poincaré–Sobolev and divergence checks");
    add_common(*verify, o);

    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        diagnostic(err, "invalid_input", e.what());
        return kExitInvalidInput;
    }
    try {
        CLI::App* cmd = app.get_subcommands().front();
        merge_config(o, *cmd);
        if (cmd == solve) return cmd_solve(o, out);
        if (cmd == green) return cmd_green(o, out);
        return cmd_verify(o, out);
    } catch (const InvalidInput& e) {
        diagnostic(err, "invalid_input", e.what());
        return kExitInvalidInput;
    } catch (const NumericalFailure& e) {
        diagnostic(err, "numerical_failure", e.what(), e.hypothesis());
        return kExitNumericalFailure;
    } catch (const fs::filesystem_error& e) {
        diagnostic(err, "invalid_input", e.what());
        return kExitInvalidInput;
    }
}

}  // namespace mixedgreen::cli
