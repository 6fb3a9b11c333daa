#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcp/closedform.hpp"
#include "bcp/duality.hpp"
#include "bcp/geomfix.hpp"
#include "bcp/io.hpp"
#include "bcp/recursions.hpp"
#include "bcp/simulate.hpp"
#include "validate.hpp"

using nlohmann::json;
using namespace bcp;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitSpec = 2;
constexpr int kExitNumeric = 3;

struct Common {
    std::string model = "bs";
    double sigma = 1, theta0 = 0.5, theta1 = 0.5;
    int N = 10;
    double s = 0.5, u0 = 0.1, u1 = 0.1;
    int K = 0;
    double tol = 0;
    std::uint64_t seed = 42;
    double events = 1e5;
    std::string out;
    std::string format = "json";
};

struct Model {
    bool moran = false;
    std::optional<LambdaMeasure> measure;
    std::string name;
};

Model resolve_model(const std::string& spec)
{
    Model m;
    m.name = spec;
    if (spec == "moran") {
        m.moran = true;
    } else if (spec == "kingman") {
        m.measure = LambdaMeasure::kingman(2);
    } else if (spec == "bs" || spec == "uniform") {
        m.measure = LambdaMeasure::uniform();
    } else if (spec == "star") {
        m.measure = LambdaMeasure::star(1);
    } else if (spec == "zero") {
        m.measure = LambdaMeasure::zero();
    } else if (spec == "beta31") {
        m.measure = LambdaMeasure::beta(3, 1);
    } else {
        m.measure = io::load_measure(spec);
    }
    return m;
}

ModelParams model_params(const Common& c)
{
    ModelParams p{c.sigma, c.theta0, c.theta1};
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw SpecError(e.what());
    }
    return p;
}

MoranParams moran_params(const Common& c)
{
    MoranParams p{c.N, c.s, c.u0, c.u1};
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw SpecError(e.what());
    }
    return p;
}

json header(const std::string& command, const Common& c, const Model& m)
{
    json h{{"tool", "bcp"}, {"version", io::kLibraryVersion}, {"command", command}, {"model", m.name}};
    if (m.moran) {
        h["params"] = io::params_json(moran_params(c));
    } else {
        h["params"] = io::params_json(model_params(c));
        h["measure"] = io::measure_to_json(*m.measure);
    }
    h["options"] = {{"K", c.K}, {"tol", c.tol}, {"seed", c.seed}, {"events", c.events}};
    return h;
}

// CSV artifacts start with '#' lines carrying the same record as the JSON.
std::string csv_preamble(const json& h)
{
    return "# bcp " + std::string(io::kLibraryVersion) + "\n# " + h.dump() + "\n";
}

void emit(const Common& c, const json& record, const std::string& csv_body)
{
    const std::string csv = csv_body.empty() ? std::string() : csv_preamble(record["header"]) + csv_body;
    if (c.out.empty()) {
        if (c.format == "csv" && !csv.empty())
            std::cout << csv;
        else
            std::cout << record.dump(2) << '\n';
        return;
    }
    auto write = [](const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw SpecError("cannot write '" + path + "'");
        f << text;
    };
    write(c.out + ".json", record.dump(2) + "\n");
    if (!csv.empty()) write(c.out + ".csv", csv);
}

// The Bolthausen-Sznitman measure: uniform of unit mass, no atoms.
bool is_bs(const LambdaMeasure& m)
{
    const auto* u = std::get_if<UniformScaled>(&m.interior());
    return u && u->c == 1 && m.m0() == 0 && m.m1() == 0;
}

json pmf_json(const StationaryPmf& pmf) { return {{"p", pmf.probs}, {"diagnostics", io::pmf_diagnostics(pmf)}}; }

int cmd_stationary(const Common& c)
{
    const Model m = resolve_model(c.model);
    json rec{{"header", header("stationary", c, m)}};
    std::ostringstream csv;
    if (m.moran) {
        const auto p = moran_params(c);
        const auto pmf = solve_moran(p);
        rec["pmf"] = pmf_json(pmf);
        rec["mean"] = pmf.mean();
        io::write_pmf_csv(csv, pmf);
    } else {
        const auto p = model_params(c);
        LambdaSolveOptions opt;
        if (c.K > 0) opt.K = c.K;
        if (c.tol > 0) opt.tol = c.tol;
        const auto pmf = solve_lambda_truncated(*m.measure, p, opt);
        rec["pmf"] = pmf_json(pmf);
        rec["mean"] = pmf.mean();
        const auto rec_test = is_positive_recurrent(*m.measure, p);
        rec["recurrence"] = {{"positive", rec_test.positive()}, {"clause", rec_test.clause}};
        if (is_bs(*m.measure)) rec["rho"] = bs_rho(p);
        io::write_pmf_csv(csv, pmf);
    }
    emit(c, rec, csv.str());
    return 0;
}

int cmd_simulate(const Common& c, int start, const std::string& process)
{
    const Model m = resolve_model(c.model);
    if (!(c.events >= 1 && c.events <= 1e9)) throw SpecError("--events must lie in [1, 1e9]");
    const long events = std::lround(c.events);
    json rec{{"header", header("simulate", c, m)}};
    rec["header"]["options"]["start"] = start;
    rec["header"]["options"]["process"] = process;
    sim::JumpPath path;
    if (m.moran) {
        const auto p = moran_params(c);
        if (process == "X")
            path = sim::simulate_moran_X(p, start, events, c.seed);
        else
            path = sim::simulate_moran_L(p, start, events, c.seed);
    } else {
        const auto p = model_params(c);
        if (process == "killed")
            path = sim::simulate_killed_asg_path(*m.measure, p, start, events, c.seed);
        else
            path = sim::simulate_lambda_L(*m.measure, p, start, events, c.seed);
    }
    rec["rng"] = path.rng;
    rec["seed"] = path.seed;
    rec["n_events"] = path.states.size() - 1;
    rec["absorbed"] = path.absorbed;
    rec["warnings"] = path.warnings;
    if (!path.absorbed) {
        const auto occ = sim::occupancy(path);
        json w = json::object();
        for (const auto& [k, v] : occ.weights) w[std::to_string(k)] = v;
        rec["occupancy"] = {{"burn_in_fraction", 0.2}, {"total_time", occ.total_time}, {"weights", w}};
    } else {
        rec["final_state"] = path.states.back();
    }
    std::ostringstream csv;
    io::write_path_csv(csv, path);
    emit(c, rec, csv.str());
    return 0;
}

int cmd_moments(const Common& c)
{
    const Model m = resolve_model(c.model);
    if (m.moran) throw SpecError("moments needs a Lambda measure, not the Moran model");
    const auto p = model_params(c);
    MomentOptions opt;
    if (c.K > 0) opt.K = c.K;
    if (c.tol > 0) opt.tol = c.tol;
    const auto w = solve_w_moments(*m.measure, p, opt);
    json rec{{"header", header("moments", c, m)}};
    rec["w"] = w.w;
    rec["diagnostics"] = {{"K", w.truncation_K},
                          {"residual", w.residual},
                          {"closure_sensitivity", w.closure_sensitivity},
                          {"monotonicity_defect", w.monotonicity_defect},
                          {"completely_monotone", w.completely_monotone}};
    std::ostringstream csv;
    io::write_moments_csv(csv, w);
    emit(c, rec, csv.str());
    return 0;
}

int cmd_geom_check(const Common& c, std::optional<double> rho_opt, int n_max)
{
    const Model m = resolve_model(c.model);
    if (m.moran) throw SpecError("geom-check needs a Lambda measure, not the Moran model");
    const auto p = model_params(c);
    double rho;
    std::string source;
    if (rho_opt) {
        rho = *rho_opt;
        source = "given";
    } else {
        rho = 1 - solve_lambda_truncated(*m.measure, p).p(1);
        source = "1 - p_1 of the stationary pmf";
    }
    if (!(rho > 0 && rho < 1)) throw SpecError("rho must lie in (0, 1)");
    const auto g = check_geometric(*m.measure, rho, p, n_max, c.tol > 0 ? c.tol : 1e-8);
    json rec{{"header", header("geom-check", c, m)}};
    rec["rho"] = rho;
    rec["rho_source"] = source;
    rec["geometric"] = g.geometric();
    rec["m0_zero"] = g.m0_zero;
    rec["m1_zero"] = g.m1_zero;
    rec["dust_free"] = g.dust_free;
    rec["cg3a"] = {{"pass", g.cg3a_pass}, {"max", g.cg3a_max}, {"residuals", g.cg3a_residuals}};
    rec["cg3b"] = {{"pass", g.cg3b_pass}, {"residual", g.cg3b_residual}};
    rec["cg1"] = {{"pass", g.cg1_pass}, {"max", g.cg1_max}, {"residuals", g.cg1_residuals}};
    emit(c, rec, "");
    return 0;
}

int cmd_dual(const Common& c, int grid)
{
    const Model m = resolve_model(c.model);
    if (m.moran) throw SpecError("dual needs a Lambda measure, not the Moran model");
    if (grid < 2 || grid > 100000) throw SpecError("--grid must lie in [2, 100000]");
    const auto p = model_params(c);
    json rec{{"header", header("dual", c, m)}};
    const auto w = solve_w_moments(*m.measure, p);
    rec["w"] = w.w;
    std::ostringstream csv;
    if (is_bs(*m.measure)) {
        const double s2 = bs_singular_point(p);
        std::vector<double> s;
        for (int i = 0; i < grid; ++i) s.push_back(s2 * i / grid);
        const auto g = bs_w_generating(p, s);
        rec["generating"] = {{"s2", g.s2}, {"s", g.s}, {"w", g.values}, {"taylor", g.taylor},
                             {"contour_closure", g.contour_closure}};
        io::write_generating_csv(csv, g);
    } else {
        io::write_moments_csv(csv, w);
    }
    emit(c, rec, csv.str());
    return 0;
}

int cmd_validate(const Common& c, const std::string& suite, const std::vector<int>& only)
{
    if (suite != "quick" && suite != "full") throw SpecError("--suite must be quick or full");
    for (int id : only)
        if (id < 1 || id > validate::criterion_count()) throw SpecError("--only entries must be criterion ids");
    const auto which = suite == "full" ? validate::Suite::Full : validate::Suite::Quick;
    const auto results = validate::run_suite(which, only, [](const validate::Result& r) {
        std::fprintf(stderr, "%-4s %2d  %-36s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                     r.seconds, r.detail.c_str());
    });
    bool ok = true;
    json rows = json::array();
    std::ostringstream csv;
    csv << "id,title,pass,detail\n";
    for (const auto& r : results) {
        ok = ok && r.pass;
        rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
        csv << r.id << ",\"" << r.title << "\"," << (r.pass ? "true" : "false") << ",\"" << r.detail << "\"\n";
    }
    json rec{{"header", {{"tool", "bcp"}, {"version", io::kLibraryVersion}, {"command", "validate"},
                         {"suite", suite}, {"only", only}}},
             {"results", rows},
             {"pass", ok}};
    emit(c, rec, csv.str());
    return ok ? 0 : kExitValidation;
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--model", c.model,
                    "measure JSON file, or one of kingman, bs, uniform, star, zero, beta31, moran");
    app->add_option("--sigma", c.sigma, "selection strength");
    app->add_option("--theta0", c.theta0, "mutation rate to the beneficial type");
    app->add_option("--theta1", c.theta1, "mutation rate to the deleterious type");
    app->add_option("--N", c.N, "Moran population size")->check(CLI::Range(2, 100000));
    app->add_option("--s", c.s, "Moran selection coefficient");
    app->add_option("--u0", c.u0, "Moran mutation probability to the beneficial type");
    app->add_option("--u1", c.u1, "Moran mutation probability to the deleterious type");
    app->add_option("--K", c.K, "initial truncation level (0 = default)")->check(CLI::Range(0, 1 << 20));
    app->add_option("--tol", c.tol, "solver tolerance (0 = default)")->check(CLI::Range(0.0, 1.0));
    app->add_option("--seed", c.seed, "random seed");
    app->add_option("--events", c.events, "number of jump events");
    app->add_option("--out", c.out, "output stem; writes STEM.json and STEM.csv");
    app->add_option("--format", c.format, "stdout format when --out is absent")
        ->check(CLI::IsMember({"json", "csv"}));
}

void report_error(bool as_json, const std::string& kind, const std::string& message)
{
    if (as_json)
        std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
    else
        std::cerr << "bcp: " << kind << ": " << message << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Block counting processes: stationary laws, simulation, duality and cross-validation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::kLibraryVersion);
    bool json_errors = false;
    app.add_flag("--json-errors", json_errors, "report errors on stderr as JSON");

    Common c;
    auto* stationary = app.add_subcommand("stationary", "stationary law of the block counting process");
    add_common(stationary, c);

    auto* simulate = app.add_subcommand("simulate", "simulate a jump chain");
    add_common(simulate, c);
    int start = 1;
    std::string process = "L";
    simulate->add_option("--start", start, "initial state")->check(CLI::Range(0, 1 << 30));
    simulate->add_option("--process", process, "L (block counts), X (Moran type count) or killed (killed ASG)")
        ->check(CLI::IsMember({"L", "X", "killed"}));

    auto* moments = app.add_subcommand("moments", "moment sequence w_n of the type frequency");
    add_common(moments, c);

    auto* geom = app.add_subcommand("geom-check", "test the conditions for a geometric stationary law");
    add_common(geom, c);
    std::optional<double> rho;
    int n_max = 30;
    geom->add_option("--rho", rho, "candidate parameter (default: 1 - p_1 of the stationary pmf)");
    geom->add_option("--n-max", n_max, "largest moment index checked")->check(CLI::Range(1, 10000));

    auto* dual = app.add_subcommand("dual", "duality quantities; generating function for the uniform measure");
    add_common(dual, c);
    int grid = 20;
    dual->add_option("--grid", grid, "number of s intervals on [0, s2)");

    auto* val = app.add_subcommand("validate", "run the cross-check matrix");
    add_common(val, c);
    std::string suite = "quick";
    std::vector<int> only;
    val->add_option("--suite", suite, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    val->add_option("--only", only, "restrict to these criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report_error(json_errors, "SpecError", e.what());
        return kExitSpec;
    }

    try {
        if (*stationary) return cmd_stationary(c);
        if (*simulate) return cmd_simulate(c, start, process);
        if (*moments) return cmd_moments(c);
        if (*geom) return cmd_geom_check(c, rho, n_max);
        if (*dual) return cmd_dual(c, grid);
        if (*val) return cmd_validate(c, suite, only);
    } catch (const SpecError& e) {
        report_error(json_errors, e.kind(), e.what());
        return kExitSpec;
    } catch (const DomainError& e) {
        report_error(json_errors, e.kind(), e.what());
        return kExitSpec;
    } catch (const PreconditionViolated& e) {
        report_error(json_errors, e.kind(), e.what());
        return kExitSpec;
    } catch (const Error& e) {
        report_error(json_errors, e.kind(), e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        report_error(json_errors, "InternalError", e.what());
        return kExitNumeric;
    }
    return 0;
}
