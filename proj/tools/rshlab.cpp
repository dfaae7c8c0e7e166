// rshlab: exact analysis, drift certification and simulation of neighbour-walk heuristics.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rshlab/rshlab.hpp"

namespace fs = std::filesystem;
using namespace rshlab;

namespace {

enum Exit : int { ok = 0, input_error = 1, precondition = 2, denied = 3 };

struct Common {
    std::string builtin;
    std::string problem_file;
    std::string algo = "rsh1";
    std::string init = "20";
    std::string out = ".";
};

void add_common(CLI::App &cmd, Common &c) {
    auto *b = cmd.add_option("--builtin", c.builtin, "Built-in problem: square, square10, shifted_square");
    auto *p = cmd.add_option("--problem", c.problem_file, "Problem definition JSON file");
    b->excludes(p);
    cmd.add_option("--algo", c.algo, "rsh1 (elitist) or rsh2 (non-elitist)")->capture_default_str();
    cmd.add_option("--init", c.init, "Initial state index or 'uniform'")->capture_default_str();
    cmd.add_option("--out", c.out, "Output directory")->capture_default_str();
}

ProblemSpec resolve_problem(const Common &c) {
    if (!c.problem_file.empty())
        return io::load_problem(c.problem_file);
    return builtin_problem(c.builtin.empty() ? "square" : c.builtin);
}

InitSpec parse_init(const std::string &text) {
    if (text == "uniform")
        return InitSpec::uniform();
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used == text.size())
            return InitSpec::at(v);
    } catch (const std::logic_error &) {
    }
    throw InputError("--init must be a state index or 'uniform', got '" + text + "'");
}

Distribution initial_distribution(const AbsorbingChain &chain, const InitSpec &init) {
    return init.is_uniform() ? uniform_initial(chain) : point_mass(chain, *init.state);
}

fs::path prepare_out(const std::string &dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
        throw InputError("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

void write_stream(const fs::path &path, const std::function<void(std::ostream &)> &body) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    body(out);
}

unsigned threads_from_env() {
    const char *env = std::getenv("RSH_LAB_THREADS");
    if (!env || !*env)
        return 0;
    try {
        std::size_t used = 0;
        const auto v = std::stoul(env, &used);
        if (used == std::string(env).size())
            return static_cast<unsigned>(v);
    } catch (const std::logic_error &) {
    }
    throw InputError(std::string("RSH_LAB_THREADS must be a non-negative integer, got '") + env + "'");
}

std::string join(const std::vector<std::size_t> &v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? " " : "") << v[i];
    return os.str();
}

/// Runs of consecutive positions mapping to consecutive states, e.g. "d[0..99] -> states 0..99".
std::string index_map(const std::vector<std::size_t> &non) {
    std::ostringstream os;
    std::size_t i = 0;
    while (i < non.size()) {
        std::size_t j = i;
        while (j + 1 < non.size() && non[j + 1] == non[j] + 1)
            ++j;
        os << "  d[" << i;
        if (j > i)
            os << ".." << j;
        os << "] -> state" << (j > i ? "s " : " ") << non[i];
        if (j > i)
            os << ".." << non[j];
        os << '\n';
        i = j + 1;
    }
    return os.str();
}

// -- analyze -------------------------------------------------------------------

struct AnalyzeArgs {
    Common common;
    bool hitting = false;
    std::size_t rate_horizon = 1000;
};

int run_analyze(const AnalyzeArgs &a) {
    const auto problem = resolve_problem(a.common);
    const auto algo = parse_algorithm(a.common.algo);
    const auto init = parse_init(a.common.init);
    const auto out = prepare_out(a.common.out);
    const auto space = problem.state_space();
    const auto kernel = make_kernel(algo, problem, default_params(algo));
    const auto chain = build_chain(kernel, space);
    const auto q0 = initial_distribution(chain, init);

    AnalysisOptions opt;
    opt.hitting = a.hitting;
    opt.rate_horizon = a.rate_horizon;
    auto report = analyze(kernel, space, q0, opt);
    report.init = a.common.init;

    io::write_text_file(out / "report.json", io::report_to_json(report).dump(2) + "\n");
    write_stream(out / "rate_bounds.csv", [&](std::ostream &os) { io::write_rate_bounds_csv(os, report.rate_series); });

    std::cout << "rho=" << repro::num(report.rho, 12) << " convergent=" << (report.convergent ? "true" : "false");
    if (report.mean_hitting_time)
        std::cout << " mean_hitting_time=" << repro::num(*report.mean_hitting_time, 12);
    std::cout << '\n';
    if (a.hitting && !report.convergent) {
        std::cerr << "error: chain is not convergent, hitting times are infinite; stuck states: "
                  << join(report.stuck_states) << '\n';
        return precondition;
    }
    return ok;
}

// -- simulate ------------------------------------------------------------------

struct SimulateArgs {
    Common common;
    std::uint64_t runs = 100'000;
    std::uint64_t seed = 0;
    std::uint64_t max_iter = 1'000'000;
    std::uint64_t stride = 1;
};

int run_simulate(const SimulateArgs &a) {
    const auto problem = resolve_problem(a.common);
    const auto algo = parse_algorithm(a.common.algo);
    SimConfig cfg;
    cfg.runs = a.runs;
    cfg.seed = a.seed;
    cfg.max_iterations = a.max_iter;
    cfg.record_stride = a.stride;
    cfg.init = parse_init(a.common.init);
    cfg.validate();
    const unsigned threads = threads_from_env();
    const auto out = prepare_out(a.common.out);

    const auto stats = simulate({algo, problem, default_params(algo)}, cfg, threads);
    write_stream(out / "curve.csv", [&](std::ostream &os) { io::write_curve_csv(os, stats); });
    write_stream(out / "rate.csv", [&](std::ostream &os) { io::write_rate_csv(os, empirical_average_rate(stats)); });
    write_stream(out / "tau.csv", [&](std::ostream &os) { io::write_tau_csv(os, stats); });

    const auto est = empirical_hitting_time(stats);
    auto show = [](double v) { return std::isfinite(v) ? repro::num(v, 10) : std::string("nan"); };
    std::cout << "mean_tau=" << show(est.mean) << " stderr=" << show(est.std_error) << " censored=" << est.censored
              << '\n';
    if (est.all_censored)
        std::cerr << "note: every run was censored at " << cfg.max_iterations << " iterations\n";
    else if (est.lower_bound_only)
        std::cerr << "note: " << est.censored << " censored runs; mean_tau underestimates the hitting time\n";
    return ok;
}

// -- drift ---------------------------------------------------------------------

struct DriftArgs {
    Common common;
    std::string drift_file;
    std::string mode;
    std::size_t horizon = 100'000;
};

int run_drift(const DriftArgs &a) {
    const auto problem = resolve_problem(a.common);
    const auto algo = parse_algorithm(a.common.algo);
    const auto mode = parse_drift_mode(a.mode);
    const auto init = parse_init(a.common.init);
    const auto out = prepare_out(a.common.out);
    const auto chain = build_chain(make_kernel(algo, problem, default_params(algo)), problem.state_space());
    std::cout << "drift index map (" << chain.size() << " non-optimal states):\n" << index_map(chain.non_index());
    const auto d = io::load_drift(a.drift_file, chain.size());
    const auto q0 = initial_distribution(chain, init);

    const auto rep = certify(chain, d, q0, a.horizon, mode);
    io::write_text_file(out / "drift_report.json", io::drift_report_to_json(rep).dump(2) + "\n");

    std::cout << "mode=" << to_string(rep.mode) << " certificate=" << to_string(rep.certificate)
              << " status=" << to_string(rep.status) << " margin=" << repro::num(rep.hypothesis_margin, 6);
    if (rep.bound)
        std::cout << " bound=" << repro::num(*rep.bound, 12);
    if (rep.violator_state)
        std::cout << " violator_state=" << *rep.violator_state;
    if (rep.violator_iteration)
        std::cout << " violator_iteration=" << *rep.violator_iteration;
    std::cout << '\n';
    if (rep.status == CertificateStatus::denied)
        return denied;
    if (rep.status == CertificateStatus::horizon_limited)
        std::cerr << "warning: non-optimal mass at the horizon is not negligible; the hypothesis was only checked up "
                     "to t="
                  << a.horizon << '\n';
    return ok;
}

// -- reproduce -----------------------------------------------------------------

struct ReproduceArgs {
    ReproOptions opt;
    std::string out = ".";
};

int run_reproduce(ReproduceArgs a) {
    a.opt.threads = threads_from_env();
    if (a.opt.runs < 1)
        throw InputError("--runs must be at least 1");
    const auto out = prepare_out(a.out);
    const auto rows = reproduce(a.opt);
    if (rows.empty())
        throw InputError("--only '" + a.opt.only + "' matches no rows");
    const auto table = reproduction_markdown(rows, a.opt);
    io::write_text_file(out / "reproduction.md", table);
    std::cout << table;
    bool all = true;
    for (const auto &r : rows)
        all = all && r.pass;
    return all ? ok : precondition;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact and empirical analysis of neighbour-walk search heuristics"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    auto *analyze_cmd = app.add_subcommand("analyze", "Spectral test, hitting times and rate bounds");
    add_common(*analyze_cmd, analyze_args.common);
    analyze_cmd->add_flag("--hitting", analyze_args.hitting, "Solve for hitting and staying times");
    analyze_cmd->add_option("--rate-horizon", analyze_args.rate_horizon, "Largest rate-bound horizon")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    SimulateArgs sim_args;
    auto *sim_cmd = app.add_subcommand("simulate", "Monte Carlo runs of the heuristic");
    add_common(*sim_cmd, sim_args.common);
    sim_cmd->add_option("--runs", sim_args.runs, "Number of independent runs")->capture_default_str();
    sim_cmd->add_option("--seed", sim_args.seed, "Master seed")->capture_default_str();
    sim_cmd->add_option("--max-iter", sim_args.max_iter, "Iteration budget per run")->capture_default_str();
    sim_cmd->add_option("--stride", sim_args.stride, "Record tallies every R iterations")->capture_default_str();

    DriftArgs drift_args;
    auto *drift_cmd = app.add_subcommand("drift", "Check a drift function against the drift theorems");
    add_common(*drift_cmd, drift_args.common);
    drift_cmd->add_option("--drift", drift_args.drift_file, "Drift function JSON {\"d\": [...]}")->required();
    drift_cmd->add_option("--mode", drift_args.mode,
                          "avg_upper, avg_lower, pointwise_upper, pointwise_lower, backward_upper, backward_lower")
        ->required();
    drift_cmd->add_option("--drift-horizon", drift_args.horizon, "Iterations checked by the average-drift modes")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);

    ReproduceArgs repro_args;
    auto *repro_cmd = app.add_subcommand("reproduce", "Re-derive the published case-study numbers");
    repro_cmd->add_option("--only", repro_args.opt.only, "Row id or topic (spectral, convergence, hitting, drift, "
                                                         "simulation, rate)");
    repro_cmd->add_option("--seed", repro_args.opt.seed, "Master seed for the simulation rows")->capture_default_str();
    repro_cmd->add_option("--runs", repro_args.opt.runs, "Runs per simulation row")->capture_default_str();
    repro_cmd->add_option("--out", repro_args.out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return input_error;
    }

    try {
        if (*analyze_cmd)
            return run_analyze(analyze_args);
        if (*sim_cmd)
            return run_simulate(sim_args);
        if (*drift_cmd)
            return run_drift(drift_args);
        return run_reproduce(repro_args);
    } catch (const SingularSystem &e) {
        std::cerr << "error: " << e.what() << '\n';
        return precondition;
    } catch (const NoConvergence &e) {
        std::cerr << "error: " << e.what() << '\n';
        return precondition;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    }
}
