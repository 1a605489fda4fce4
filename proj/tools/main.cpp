#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oplab/battery.hpp"
#include "oplab/grid_io.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;
using namespace oplab;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (std::string_view k : allowed)
            if (it.key() == k) known = true;
        if (!known) throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
    }
}

double need_num(const Json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(ctx + ": missing numeric '" + std::string(key) + "'");
    return j.at(key).get<double>();
}

Domain parse_domain(const Json& j) {
    check_keys(j, {"origin", "extent", "n"}, "domain");
    const auto arr2 = [&](const char* key) -> std::array<double, 2> {
        if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2)
            throw ConfigError(std::string("domain.") + key + ": expected [x, y]");
        return {j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>()};
    };
    Domain d;
    d.origin = arr2("origin");
    d.extent = arr2("extent");
    if (!j.contains("n") || !j.at("n").is_array() || j.at("n").size() != 2)
        throw ConfigError("domain.n: expected [nx, ny]");
    d.n = {j.at("n").at(0).get<int>(), j.at("n").at(1).get<int>()};
    d.validate();
    return d;
}

BoundarySpec parse_boundary(const Json& j) {
    check_keys(j, {"kind", "a", "b", "value", "degree"}, "boundary");
    BoundarySpec b;
    if (!j.contains("kind")) throw ConfigError("boundary: missing 'kind'");
    b.kind = j.at("kind").get<std::string>();
    if (j.contains("a")) b.a = j.at("a").get<double>();
    if (j.contains("b")) b.b = j.at("b").get<double>();
    if (j.contains("value")) b.value = j.at("value").get<double>();
    if (j.contains("degree")) b.degree = j.at("degree").get<int>();
    return b;
}

ProblemSpec parse_problem(const Json& j) {
    check_keys(j, {"p", "regime", "domain", "boundary"}, "problem");
    const double p = need_num(j, "p", "problem");
    if (!j.contains("regime")) throw ConfigError("problem: missing 'regime'");
    const Regime regime = regime_from_name(j.at("regime").get<std::string>());
    const Domain d = parse_domain(j.at("domain"));
    const BoundarySpec b = parse_boundary(j.at("boundary"));
    ProblemSpec spec = make_problem(p, regime, d, b);
    spec.validate();
    return spec;
}

SolverConfig parse_solver(const Json& j) {
    SolverConfig cfg;
    if (j.is_null()) return cfg;
    check_keys(j,
               {"grad_tol", "max_newton_iters", "max_cg_iters", "cg_tol", "armijo_c",
                "backtrack", "eps_schedule"},
               "solver");
    if (j.contains("grad_tol")) cfg.grad_tol = j.at("grad_tol").get<double>();
    if (j.contains("max_newton_iters")) cfg.max_newton_iters = j.at("max_newton_iters").get<int>();
    if (j.contains("max_cg_iters")) cfg.max_cg_iters = j.at("max_cg_iters").get<int>();
    if (j.contains("cg_tol")) cfg.cg_tol = j.at("cg_tol").get<double>();
    if (j.contains("armijo_c")) cfg.armijo_c = j.at("armijo_c").get<double>();
    if (j.contains("backtrack")) cfg.backtrack = j.at("backtrack").get<double>();
    if (j.contains("eps_schedule")) {
        cfg.eps_schedule.clear();
        for (const auto& v : j.at("eps_schedule")) cfg.eps_schedule.push_back(v.get<double>());
    }
    cfg.validate();
    return cfg;
}

void require_schema(const Json& j, const std::string& expected) {
    if (!j.contains("schema") || j.at("schema").get<std::string>() != expected)
        throw ConfigError("config: expected schema '" + expected + "'");
}

std::string report_to_json(const SolveReport& r) {
    std::ostringstream os;
    os << "{\"iters\":" << r.iters << ",\"converged\":" << (r.converged ? "true" : "false")
       << ",\"failed_stage\":" << r.failed_stage
       << ",\"final_grad_norm\":" << format_g17(r.final_grad_norm)
       << ",\"fitted_bound_C\":" << format_g17(r.fitted_bound_C) << ",\"energy_history\":[";
    for (std::size_t i = 0; i < r.energy_history.size(); ++i) {
        if (i) os << ',';
        os << format_g17(r.energy_history[i]);
    }
    os << "],\"eps_trace\":[";
    for (std::size_t i = 0; i < r.eps_trace.size(); ++i) {
        const EpsStage& st = r.eps_trace[i];
        if (i) os << ',';
        os << "{\"eps\":" << format_g17(st.eps)
           << ",\"energy_regularized\":" << format_g17(st.energy_regularized)
           << ",\"energy_per_axis\":[" << format_g17(st.energy_per_axis[0]) << ','
           << format_g17(st.energy_per_axis[1])
           << "],\"energy_eps_part\":" << format_g17(st.energy_eps_part)
           << ",\"energy_orthotropic\":" << format_g17(st.energy_orthotropic)
           << ",\"grad_norm\":" << format_g17(st.grad_norm)
           << ",\"newton_iters\":" << st.newton_iters << '}';
    }
    os << "]}";
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

fs::path make_run_dir(const std::string& out_root, const std::string& command, const Json& cfg,
                      std::uint64_t seed) {
    const std::string canonical = cfg.dump() + "#seed=" + std::to_string(seed);
    const fs::path dir = fs::path(out_root) / (command + "-" + hex16(fnv1a64(canonical)));
    fs::create_directories(dir);
    return dir;
}

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("ORTHO_P_LAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

// ---------------------------------------------------------------------------

int cmd_solve(const Json& cfg, const std::string& out_root, std::uint64_t seed) {
    require_schema(cfg, "oplab-solve-v1");
    check_keys(cfg, {"schema", "problem", "solver"}, "config");
    const ProblemSpec spec = parse_problem(cfg.at("problem"));
    const SolverConfig scfg = parse_solver(cfg.contains("solver") ? cfg.at("solver") : Json());

    const SolveResult res = continuation_solve(spec, scfg);

    const fs::path dir = make_run_dir(out_root, "solve", cfg, seed);
    write_file(dir / "solution.csv", grid_to_csv(res.u));
    write_file(dir / "solution.json", grid_to_json(res.u));
    write_file(dir / "report.json", report_to_json(res.report));
    std::cout << "run_dir " << dir.string() << "\n";
    if (!res.report.converged) {
        std::cerr << "solve: iteration budget exhausted at stage " << res.report.failed_stage
                  << " (residual " << format_g17(res.report.final_grad_norm) << ")\n";
        return 2;
    }
    return 0;
}

int cmd_trace(const Json& cfg, const std::string& out_root, std::uint64_t seed) {
    require_schema(cfg, "oplab-trace-v1");
    check_keys(cfg, {"schema", "problem", "solver", "trace"}, "config");
    const ProblemSpec spec = parse_problem(cfg.at("problem"));
    const SolverConfig scfg = parse_solver(cfg.contains("solver") ? cfg.at("solver") : Json());
    if (!cfg.contains("trace")) throw ConfigError("config: missing 'trace'");
    const Json& t = cfg.at("trace");
    check_keys(t, {"x0", "R0", "component", "alpha", "c0", "max_stages"}, "trace");
    if (!t.contains("x0") || !t.at("x0").is_array() || t.at("x0").size() != 2)
        throw ConfigError("trace.x0: expected [x, y]");
    const std::array<double, 2> x0{t.at("x0").at(0).get<double>(),
                                   t.at("x0").at(1).get<double>()};
    const double R0 = need_num(t, "R0", "trace");
    const int component = t.contains("component") ? t.at("component").get<int>() : 0;
    const double alpha = t.contains("alpha") ? t.at("alpha").get<double>() : 0.25;
    const double c0 = t.contains("c0") ? t.at("c0").get<double>() : 1.0;
    const int max_stages = t.contains("max_stages") ? t.at("max_stages").get<int>() : 32;

    const SolveResult res = continuation_solve(spec, scfg);
    if (!res.report.converged) {
        std::cerr << "trace: solve did not converge\n";
        return 2;
    }

    OscillationTrace trace;
    try {
        trace = decay_trace(res.u, spec.p, spec.regime, x0, R0, alpha, c0, component,
                            max_stages);
    } catch (const BallTooSmall& e) {
        std::cerr << "trace: " << e.what() << "\n";
        return 4;
    }

    std::ostringstream os;
    os << "n,R_n,M_n,delta_n,alternative,annulus_energy\n";
    for (const TraceStage& st : trace.stages)
        os << st.n << ',' << format_g17(st.R) << ',' << format_g17(st.M) << ','
           << format_g17(st.delta) << ',' << st.alternative << ','
           << format_g17(st.annulus_energy) << '\n';

    std::ostringstream js;
    js << "{\"stages\":" << trace.stages.size()
       << ",\"stop_reason\":\"" << trace.stop_reason << "\""
       << ",\"initial_dirichlet\":" << format_g17(trace.initial_dirichlet)
       << ",\"b2_energy_sum\":" << format_g17(trace.b2_energy_sum)
       << ",\"dichotomy_violation\":" << (trace.dichotomy_violation ? "true" : "false") << "}";

    const fs::path dir = make_run_dir(out_root, "trace", cfg, seed);
    write_file(dir / "trace.csv", os.str());
    write_file(dir / "trace_summary.json", js.str());
    std::cout << "run_dir " << dir.string() << "\n";
    return trace.dichotomy_violation ? 3 : 0;
}

int cmd_inequalities(const Json& cfg, const std::string& out_root, std::uint64_t seed) {
    require_schema(cfg, "oplab-inequalities-v1");
    check_keys(cfg, {"schema", "samples"}, "config");
    const long samples = cfg.contains("samples") ? cfg.at("samples").get<long>() : 100000;
    if (samples <= 0) throw ConfigError("config: samples must be positive");

    const auto rows = inequality_battery(samples, seed);
    long violations = 0;
    for (const auto& r : rows) violations += r.violations;

    const fs::path dir = make_run_dir(out_root, "inequalities", cfg, seed);
    write_file(dir / "inequalities.csv", inequality_rows_to_csv(rows));
    write_file(dir / "summary.json",
               "{\"cases\":" + std::to_string(rows.size()) +
                   ",\"violations\":" + std::to_string(violations) + "}");
    std::cout << "run_dir " << dir.string() << "\n";
    if (violations > 0) {
        std::cerr << "inequalities: " << violations << " violation(s); see "
                  << (dir / "inequalities.csv").string() << "\n";
        return 3;
    }
    return 0;
}

int cmd_stream(const Json& cfg, const std::string& out_root, std::uint64_t seed) {
    require_schema(cfg, "oplab-stream-v1");
    check_keys(cfg, {"schema", "problem", "solver", "curl_tol"}, "config");
    const ProblemSpec spec = parse_problem(cfg.at("problem"));
    const SolverConfig scfg = parse_solver(cfg.contains("solver") ? cfg.at("solver") : Json());
    const double curl_tol = cfg.contains("curl_tol")
                                ? cfg.at("curl_tol").get<double>()
                                : std::numeric_limits<double>::infinity();

    const SolveResult res = continuation_solve(spec, scfg);
    if (!res.report.converged) {
        std::cerr << "stream: solve did not converge\n";
        return 2;
    }

    StreamResult sr;
    try {
        sr = stream_function(res.u, spec.p, curl_tol);
    } catch (const CurlTooLarge& e) {
        std::cerr << "stream: " << e.what() << "\n";
        return 3;
    }
    const double dual_res = duality_residual(sr.v, spec.p, 32, seed);

    // Double application returns -u up to a constant on the interior nodes.
    const StreamResult sr2 = stream_function(sr.v, spec.p_conjugate());
    double shift_acc = 0.0;
    const Domain& dd = sr2.v.domain;
    for (int iy = 0; iy < dd.ny(); ++iy)
        for (int ix = 0; ix < dd.nx(); ++ix)
            shift_acc += sr2.v.at(ix, iy) + res.u.at(ix + 1, iy + 1);
    const double shift = shift_acc / dd.num_nodes();
    double invol = 0.0;
    for (int iy = 0; iy < dd.ny(); ++iy)
        for (int ix = 0; ix < dd.nx(); ++ix)
            invol = std::max(invol,
                             std::abs(sr2.v.at(ix, iy) + res.u.at(ix + 1, iy + 1) - shift));

    std::ostringstream js;
    js << "{\"curl_defect\":" << format_g17(sr.defect)
       << ",\"curl_defect_second\":" << format_g17(sr2.defect)
       << ",\"duality_residual\":" << format_g17(dual_res)
       << ",\"involution_error\":" << format_g17(invol) << "}";

    const fs::path dir = make_run_dir(out_root, "stream", cfg, seed);
    write_file(dir / "v.csv", grid_to_csv(sr.v));
    write_file(dir / "v.json", grid_to_json(sr.v));
    write_file(dir / "stream_report.json", js.str());
    std::cout << "run_dir " << dir.string() << "\n";
    return 0;
}

int cmd_verify(const Json& cfg, const std::string& out_root, std::uint64_t seed, int threads) {
    require_schema(cfg, "oplab-verify-v1");
    check_keys(cfg,
               {"schema", "problems", "batteries", "balls", "alpha", "c0", "c_h", "samples",
                "poincare_count", "sv_count"},
               "config");
    if (!cfg.contains("problems") || !cfg.at("problems").is_array())
        throw ConfigError("config: 'problems' must be an array");

    struct Planned {
        std::string name;
        ProblemSpec spec;
        SolverConfig cfg;
    };
    std::vector<Planned> planned;
    for (const auto& pj : cfg.at("problems")) {
        check_keys(pj, {"name", "problem", "solver"}, "problems[]");
        Planned pl;
        pl.name = pj.contains("name") ? pj.at("name").get<std::string>()
                                      : ("problem" + std::to_string(planned.size()));
        pl.spec = parse_problem(pj.at("problem"));
        pl.cfg = parse_solver(pj.contains("solver") ? pj.at("solver") : Json());
        planned.push_back(std::move(pl));
    }

    std::vector<std::string> batteries;
    if (cfg.contains("batteries"))
        for (const auto& b : cfg.at("batteries")) batteries.push_back(b.get<std::string>());
    else
        batteries = {"alternatives", "degiorgi", "min_principle", "apriori",
                     "caccioppoli", "decay_trace", "poincare", "sv_alternative",
                     "inequalities"};

    const int balls = cfg.contains("balls") ? cfg.at("balls").get<int>() : 20;
    const double alpha = cfg.contains("alpha") ? cfg.at("alpha").get<double>() : 0.25;
    const double c0 = cfg.contains("c0") ? cfg.at("c0").get<double>() : 1.0;
    const double c_h = cfg.contains("c_h") ? cfg.at("c_h").get<double>() : 2.0;
    const long samples = cfg.contains("samples") ? cfg.at("samples").get<long>() : 100000;
    const int poincare_count =
        cfg.contains("poincare_count") ? cfg.at("poincare_count").get<int>() : 10;
    const int sv_count = cfg.contains("sv_count") ? cfg.at("sv_count").get<int>() : 20;

    const auto has = [&](const char* name) {
        for (const auto& b : batteries)
            if (b == name) return true;
        return false;
    };

    std::vector<SolvedProblem> solved;
    for (const Planned& pl : planned) solved.push_back(solve_problem(pl.name, pl.spec, pl.cfg));

    std::vector<BatteryRow> rows;
    const auto append = [&](std::vector<BatteryRow> more) {
        rows.insert(rows.end(), more.begin(), more.end());
    };

    for (const SolvedProblem& sp : solved) {
        if (has("alternatives")) append(alternatives_battery(sp, balls, alpha, c0, seed, threads));
        if (has("degiorgi")) append(degiorgi_battery(sp, balls, alpha, c0, seed, threads));
        if (has("min_principle")) append(min_principle_battery(sp, balls, c_h, seed, threads));
        if (has("apriori")) append(apriori_battery(sp, balls, seed));
        if (has("caccioppoli")) append(caccioppoli_battery(sp, seed));
        if (has("decay_trace")) append(decay_trace_battery(sp, alpha, c0));
    }
    if (!solved.empty()) {
        const Domain& d = solved.front().spec.domain;
        if (has("poincare")) append(poincare_battery(d, poincare_count, seed));
        if (has("sv_alternative")) append(sv_battery(d, sv_count, seed));
    }
    if (has("min_principle_negative_control") && !solved.empty())
        append(min_principle_negative_control(solved.front().spec.domain));

    std::vector<InequalityRow> ineq_rows;
    if (has("inequalities")) ineq_rows = inequality_battery(samples, seed);

    long violations = 0;
    for (const auto& r : rows)
        if (r.outcome == "violation") ++violations;
    for (const auto& r : ineq_rows) violations += r.violations;

    const fs::path dir = make_run_dir(out_root, "verify", cfg, seed);
    write_file(dir / "batteries.csv", battery_rows_to_csv(rows));
    if (!ineq_rows.empty())
        write_file(dir / "inequalities.csv", inequality_rows_to_csv(ineq_rows));
    write_file(dir / "summary.json", "{\"rows\":" + std::to_string(rows.size()) +
                                         ",\"violations\":" + std::to_string(violations) + "}");
    if (violations > 0) {
        std::vector<BatteryRow> bad;
        for (const auto& r : rows)
            if (r.outcome == "violation") bad.push_back(r);
        write_file(dir / "violation_dump.csv", battery_rows_to_csv(bad));
        std::cerr << "verify: " << violations << " violation(s); dump at "
                  << (dir / "violation_dump.csv").string() << "\n";
    }
    std::cout << "run_dir " << dir.string() << "\n";
    return violations > 0 ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"orthotropic p-Dirichlet energy minimizer and verification lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_root = "runs";
    std::uint64_t seed = 0;
    int threads = 0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_root, "output root directory");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--threads", threads, "worker threads (env ORTHO_P_LAB_THREADS)");
    };

    CLI::App* solve = app.add_subcommand("solve", "minimize a regularized problem");
    CLI::App* verify = app.add_subcommand("verify", "run verification batteries");
    CLI::App* trace = app.add_subcommand("trace", "oscillation decay trace");
    CLI::App* ineq = app.add_subcommand("inequalities", "closed-form inequality batteries");
    CLI::App* stream = app.add_subcommand("stream", "stream function and duality residual");
    for (CLI::App* sub : {solve, verify, trace, ineq, stream}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    Json cfg;
    try {
        std::ifstream f(config_path);
        if (!f) throw ConfigError("cannot open config: " + config_path);
        cfg = Json::parse(f);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    const int n_threads = resolve_threads(threads);
    try {
        if (solve->parsed()) return cmd_solve(cfg, out_root, seed);
        if (verify->parsed()) return cmd_verify(cfg, out_root, seed, n_threads);
        if (trace->parsed()) return cmd_trace(cfg, out_root, seed);
        if (ineq->parsed()) return cmd_inequalities(cfg, out_root, seed);
        if (stream->parsed()) return cmd_stream(cfg, out_root, seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
