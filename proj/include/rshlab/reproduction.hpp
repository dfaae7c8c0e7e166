#pragma once

// Reproduction suite: re-derives the published numbers for the neighbour-walk case study
// and tabulates each claim next to the measured value.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "rshlab/analysis.hpp"
#include "rshlab/drift.hpp"
#include "rshlab/heuristics.hpp"
#include "rshlab/simulation.hpp"

namespace rshlab {

struct ReproOptions {
    std::uint64_t seed = 1;
    std::uint64_t runs = 100'000;
    unsigned threads = 0;
    /// Only rows whose id or topic contains this text; empty runs everything.
    std::string only;
};

struct ReproRow {
    std::string id;
    std::string topic;
    std::string claim;
    std::string measured;
    bool pass = false;
    double seconds = 0.0;
};

namespace repro {

inline std::string num(double v, int digits = 10) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

inline bool rel_close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

/// d(x) = c (100 - x) on 1..99 with c = 100 * 101 / 99, and d(0) = d(1).
inline DriftFunction flat_start_linear_drift() {
    Vector d(100);
    const double c = 100.0 * 101.0 / 99.0;
    for (Eigen::Index x = 1; x < 100; ++x)
        d(x) = c * (100.0 - static_cast<double>(x));
    d(0) = d(1);
    return DriftFunction(std::move(d));
}

/// d(x) = 100 (x + 1).
inline DriftFunction staying_drift() {
    Vector d(100);
    for (Eigen::Index x = 0; x < 100; ++x)
        d(x) = 100.0 * (static_cast<double>(x) + 1.0);
    return DriftFunction(std::move(d));
}

inline AbsorbingChain chain(Algorithm a, const std::string &problem) {
    return make_chain(a, builtin_problem(problem));
}

struct Outcome {
    bool pass;
    std::string measured;
};

inline Outcome spectral_row() {
    const double rho = spectral_radius(chain(Algorithm::rsh1, "square"));
    return {std::abs(rho - 0.99) <= 1e-10, "rho=" + num(rho, 15)};
}

inline Outcome verdict_row() {
    std::ostringstream os;
    bool ok = true;
    for (const auto &name : builtin_names())
        for (auto algo : {Algorithm::rsh1, Algorithm::rsh2}) {
            const auto problem = builtin_problem(name);
            const auto kernel = make_kernel(algo, problem, default_params(algo));
            const auto spec = check_convergence_spectral(build_chain(kernel, problem.state_space()));
            const auto reach = check_convergence_reachability(kernel, problem.state_space());
            const bool expect = !(name == "shifted_square" && algo == Algorithm::rsh1);
            ok = ok && spec.convergent == expect && reach.convergent == expect;
            if (!expect)
                ok = ok && spec.stuck_states == std::vector<std::size_t>{0};
            os << to_string(algo) << '/' << name << '=' << (spec.convergent ? "conv" : "stuck") << ' ';
        }
    return {ok, os.str()};
}

inline Outcome uniform_hitting_row() {
    const auto c = chain(Algorithm::rsh1, "square");
    const auto t = hitting_times(c);
    const double mean = expected_hitting_time(t, uniform_initial(c));
    bool ok = rel_close(mean, 5000.0, 1e-6);
    for (Eigen::Index x = 0; x < t.h.size(); ++x) {
        const double closed = x == 0 ? 10000.0 : 100.0 * (100.0 - static_cast<double>(x));
        ok = ok && rel_close(t.h(x), closed, 1e-8);
    }
    return {ok, "mean=" + num(mean, 12)};
}

inline Outcome identity_row() {
    const auto t = hitting_times(chain(Algorithm::rsh1, "square"));
    const double sh = t.h.sum(), ss = t.staying.sum();
    return {rel_close(sh, 505000.0, 1e-6) && rel_close(ss, 505000.0, 1e-6),
            "sum_h=" + num(sh, 12) + " sum_s=" + num(ss, 12)};
}

inline Outcome drift_row() {
    const auto c = chain(Algorithm::rsh1, "square");
    const auto q0 = uniform_initial(c);
    const auto d1 = flat_start_linear_drift();
    const Vector delta = pointwise_drift(c, d1);
    bool pointwise_ok = std::abs(delta(0)) <= 1e-12;
    for (Eigen::Index x = 1; x < 100; ++x)
        pointwise_ok = pointwise_ok && std::abs(delta(x) - 101.0 / 99.0) <= 1e-12;
    const double avg0 = average_drift(c, d1, q0, 0).values.front().second;
    const bool avg0_ok = std::abs(avg0 - 1.0) <= 1e-12;
    const auto denied = certify(c, d1, q0, 1, DriftMode::pointwise_upper);
    const bool denied_ok = denied.certificate == CertificateKind::none && denied.violator_state == 0u;
    const auto granted = certify(c, d1, q0, 100'000, DriftMode::avg_upper);
    const bool granted_ok = granted.certificate == CertificateKind::upper_hitting;

    const auto d2 = staying_drift();
    const Vector nabla = backward_drift(c, d2);
    bool staying_ok = (nabla.array() - 1.0).abs().maxCoeff() <= 1e-12;
    for (auto mode : {DriftMode::backward_upper, DriftMode::backward_lower}) {
        const auto rep = certify(c, d2, q0, 1, mode);
        staying_ok = staying_ok && rep.bound_vector && *rep.bound_vector == d2.values();
    }
    std::ostringstream os;
    os << "delta(0)=" << num(delta(0)) << " delta(1..99)=" << (pointwise_ok ? "101/99" : "off")
       << " avg_drift_0=" << num(avg0, 12) << (avg0_ok ? "" : " (claim 1)")
       << " pointwise_upper=" << to_string(denied.certificate)
       << " violator=" << (denied.violator_state ? std::to_string(*denied.violator_state) : "-")
       << " avg_upper=" << to_string(granted.certificate) << " bound=" << num(granted.bound.value_or(NAN), 12)
       << " nabla=1:" << (staying_ok ? "yes" : "no");
    return {pointwise_ok && avg0_ok && denied_ok && granted_ok && staying_ok, os.str()};
}

inline Outcome hitting_simulation_row(const ReproOptions &opt) {
    std::ostringstream os;
    bool ok = true;
    for (auto algo : {Algorithm::rsh1, Algorithm::rsh2}) {
        const WalkSpec spec{algo, builtin_problem("square"), default_params(algo)};
        SimConfig cfg;
        cfg.runs = opt.runs;
        cfg.seed = opt.seed;
        cfg.init = InitSpec::at(20);
        cfg.record_stride = 1000;
        const auto est = empirical_hitting_time(simulate(spec, cfg, opt.threads));
        const double exact = hitting_times(make_chain(algo, spec.problem)).h(20);
        ok = ok && !est.all_censored && rel_close(est.mean, exact, 0.02);
        os << to_string(algo) << ": mean_tau=" << num(est.mean, 7) << " exact=" << num(exact, 9) << ' ';
    }
    return {ok, os.str()};
}

inline Outcome stuck_simulation_row(const ReproOptions &opt) {
    const WalkSpec spec{Algorithm::rsh1, builtin_problem("shifted_square"), default_params(Algorithm::rsh1)};
    SimConfig cfg;
    cfg.runs = std::max<std::uint64_t>(opt.runs, 1000);
    cfg.max_iterations = 100'000;
    cfg.seed = opt.seed;
    cfg.init = InitSpec::at(20);
    cfg.record_stride = 100;
    const auto stats = simulate(spec, cfg, opt.threads);
    bool zero = true;
    for (const auto &[t, p] : empirical_convergence_curve(stats))
        zero = zero && p == 0.0;
    return {zero && stats.censored_count == stats.runs,
            "max_curve=" + std::string(zero ? "0" : ">0") + " censored=" + std::to_string(stats.censored_count) +
                "/" + std::to_string(stats.runs)};
}

struct RateCurve {
    std::vector<std::pair<std::uint64_t, std::optional<double>>> rate;
    std::optional<std::pair<std::uint64_t, double>> last;
    bool cutoff_consistent = true;
    bool cutoff_engaged = false;
};

inline RateCurve rate_curve(Algorithm algo, const ReproOptions &opt, std::uint64_t horizon) {
    const WalkSpec spec{algo, builtin_problem("square"), default_params(algo)};
    SimConfig cfg;
    cfg.runs = opt.runs;
    cfg.max_iterations = horizon;
    cfg.seed = opt.seed;
    cfg.init = InitSpec::at(20);
    cfg.record_stride = 1;
    const auto stats = simulate(spec, cfg, opt.threads);
    RateCurve out;
    out.rate = empirical_average_rate(stats);
    const double k = static_cast<double>(stats.runs);
    for (std::size_t i = 0, r = 0; i < stats.recorded_t.size(); ++i) {
        if (stats.recorded_t[i] == 0)
            continue;
        const bool small = static_cast<double>(stats.nonopt_counts[i]) / k <= kRateCutoff;
        const auto &value = out.rate[r++].second;
        out.cutoff_consistent = out.cutoff_consistent && (small != value.has_value());
        out.cutoff_engaged = out.cutoff_engaged || small;
        if (value)
            out.last = std::make_pair(stats.recorded_t[i], *value);
    }
    return out;
}

inline Outcome rate_row(const ReproOptions &opt) {
    constexpr std::uint64_t horizon = 40'000;
    const auto elitist = rate_curve(Algorithm::rsh1, opt, horizon);
    const auto non_elitist = rate_curve(Algorithm::rsh2, opt, horizon);
    bool ordered = true;
    for (std::size_t i = 0; i < elitist.rate.size(); ++i) {
        const auto &[t, a] = elitist.rate[i];
        const auto &b = non_elitist.rate[i].second;
        if (t >= 10'000 && a && b)
            ordered = ordered && *b < *a;
    }
    const bool ok = elitist.last && non_elitist.last && std::abs(elitist.last->second - 0.0009) <= 0.0002 &&
                    std::abs(non_elitist.last->second - 0.0004) <= 0.0002 && elitist.cutoff_consistent &&
                    non_elitist.cutoff_consistent && elitist.cutoff_engaged && ordered;
    std::ostringstream os;
    auto describe = [&os](const char *name, const RateCurve &c) {
        os << name << ": ";
        if (c.last)
            os << num(c.last->second, 4) << " at t=" << c.last->first;
        else
            os << "undefined";
        os << (c.cutoff_engaged ? " (cutoff engaged) " : " ");
    };
    describe("rsh1", elitist);
    describe("rsh2", non_elitist);
    os << "rsh2<rsh1:" << (ordered ? "yes" : "no");
    return {ok, os.str()};
}

} // namespace repro

/// Runs the selected rows in order and returns one row per published claim.
inline std::vector<ReproRow> reproduce(const ReproOptions &opt) {
    struct Spec {
        const char *id;
        const char *topic;
        const char *claim;
        std::function<repro::Outcome()> run;
    };
    const std::vector<Spec> specs{
        {"1", "spectral", "rho(Q) = 0.99 for rsh1 on x^2", repro::spectral_row},
        {"2", "convergence", "rsh1 stuck only on (x-49)^2 (state 0); rsh2 always convergent", repro::verdict_row},
        {"3", "hitting", "uniform-start hitting time of rsh1 on x^2 = 5000", repro::uniform_hitting_row},
        {"4", "hitting", "sum of hitting times = sum of staying times = 505000", repro::identity_row},
        {"5", "drift", "drift examples: delta = 101/99, average drift 1, avg_upper certifies, nabla = 1",
         repro::drift_row},
        {"6", "simulation", "mean tau from 20: ~8000 (rsh1), ~16000 (rsh2) within 2%",
         [&opt] { return repro::hitting_simulation_row(opt); }},
        {"7", "simulation", "rsh1 on (x-49)^2 from 20 never converges",
         [&opt] { return repro::stuck_simulation_row(opt); }},
        {"9", "rate", "empirical rate about 0.0009 (rsh1) and 0.0004 (rsh2)",
         [&opt] { return repro::rate_row(opt); }},
    };
    std::vector<ReproRow> rows;
    for (const auto &s : specs) {
        if (!opt.only.empty() && std::string(s.id) != opt.only &&
            std::string(s.topic).find(opt.only) == std::string::npos)
            continue;
        const auto start = std::chrono::steady_clock::now();
        const auto outcome = s.run();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back({s.id, s.topic, s.claim, outcome.measured, outcome.pass, secs});
    }
    return rows;
}

inline std::string reproduction_markdown(const std::vector<ReproRow> &rows, const ReproOptions &opt) {
    std::ostringstream os;
    os << "# Reproduction\n\n"
       << "seed " << opt.seed << ", " << opt.runs << " runs per simulation\n\n"
       << "| # | topic | claim | measured | result | seconds |\n"
       << "|---|---|---|---|---|---|\n";
    for (const auto &r : rows)
        os << "| " << r.id << " | " << r.topic << " | " << r.claim << " | " << r.measured << " | "
           << (r.pass ? "pass" : "FAIL") << " | " << repro::num(r.seconds, 3) << " |\n";
    return os.str();
}

} // namespace rshlab
