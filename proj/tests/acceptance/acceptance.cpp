// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rshlab/rshlab.hpp"

using namespace rshlab;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

struct Pair {
    std::string problem;
    Algorithm algo;
    bool convergent() const { return !(problem == "shifted_square" && algo == Algorithm::rsh1); }
    std::string name() const { return std::string(to_string(algo)) + "/" + problem; }
};

std::vector<Pair> builtin_pairs() {
    std::vector<Pair> out;
    for (const auto &p : builtin_names())
        for (auto a : {Algorithm::rsh1, Algorithm::rsh2})
            out.push_back({p, a});
    return out;
}

AbsorbingChain chain_of(const Pair &p) { return make_chain(p.algo, builtin_problem(p.problem)); }

// closed forms for the elitist walk on x^2: each improvement is a geometric wait with p = 0.01
double closed_form_h(int x) { return x == 0 ? 10000.0 : 100.0 * (100.0 - x); }
double closed_form_s(int x) { return 100.0 * (x + 1); }

constexpr std::uint64_t kSeed = 20240601;

void criterion1(Verdict &v) {
    const auto t0 = Clock::now();
    const double rho = spectral_radius(chain_of({"square", Algorithm::rsh1}));
    const double secs = seconds_since(t0);
    v.require(std::abs(rho - 0.99) <= 1e-10, "rho within 1e-10 of 0.99");
    v.require(secs < 1.0, "runtime under 1 s");
    v.detail << "rho=" << std::setprecision(15) << rho << " time=" << std::setprecision(3) << secs << "s";
}

void criterion2(Verdict &v) {
    const auto t0 = Clock::now();
    for (const auto &p : builtin_pairs()) {
        const auto problem = builtin_problem(p.problem);
        const auto kernel = make_kernel(p.algo, problem, default_params(p.algo));
        const auto spectral = check_convergence_spectral(build_chain(kernel, problem.state_space()));
        const auto reach = check_convergence_reachability(kernel, problem.state_space());
        v.require(spectral.convergent == p.convergent(), p.name() + " spectral verdict");
        v.require(reach.convergent == spectral.convergent, p.name() + " methods agree");
        if (!p.convergent()) {
            v.require(spectral.stuck_states == std::vector<std::size_t>{0}, "spectral stuck state 0");
            v.require(!reach.stuck_states.empty() && reach.stuck_states.front() == 0, "reachability lists state 0");
        }
        v.detail << p.name() << "=" << (spectral.convergent ? "conv" : "stuck") << " ";
    }
    const double secs = seconds_since(t0);
    v.require(secs < 1.0, "runtime under 1 s");
    v.detail << "time=" << std::setprecision(3) << secs << "s";
}

void criterion3(Verdict &v) {
    const auto t0 = Clock::now();
    const auto chain = chain_of({"square", Algorithm::rsh1});
    const auto t = hitting_times(chain);
    const double mean = expected_hitting_time(t, uniform_initial(chain));
    const double secs = seconds_since(t0);
    double worst = 0.0;
    for (int x = 0; x < 100; ++x)
        worst = std::max(worst, std::abs(t.h(x) - closed_form_h(x)) / closed_form_h(x));
    v.require(rel_close(mean, 5000.0, 1e-6), "uniform mean 5000");
    v.require(worst <= 1e-8, "per-state closed form");
    v.require(secs < 1.0, "runtime under 1 s");
    v.detail << "mean=" << std::setprecision(12) << mean << " max_rel_err=" << std::setprecision(3) << worst
             << " time=" << secs << "s";
}

void criterion4(Verdict &v) {
    const auto t = hitting_times(chain_of({"square", Algorithm::rsh1}));
    double closed_h = 0.0, closed_s = 0.0;
    for (int x = 0; x < 100; ++x) {
        closed_h += closed_form_h(x);
        closed_s += closed_form_s(x);
    }
    v.require(closed_h == 505000.0 && closed_s == 505000.0, "closed-form sums");
    v.require(rel_close(t.h.sum(), 505000.0, 1e-6), "sum h");
    v.require(rel_close(t.staying.sum(), 505000.0, 1e-6), "sum s");
    v.detail << "sum_h=" << std::setprecision(12) << t.h.sum() << " sum_s=" << t.staying.sum();
}

void criterion5(Verdict &v) {
    const auto chain = chain_of({"square", Algorithm::rsh1});
    const auto q0 = uniform_initial(chain);
    Vector d1(100);
    for (int x = 1; x < 100; ++x)
        d1(x) = 100.0 * 101.0 / 99.0 * (100.0 - x);
    d1(0) = d1(1);
    const DriftFunction first(d1);

    // scalar oracle: d(x) - sum_y d(y) P(x, y) over the walk's case table
    const auto f = oracle::square();
    auto scalar_drift = [&](int x) {
        double acc = d1(x);
        for (int y = 0; y < 100; ++y)
            acc -= d1(y) * oracle::case_table(f, x, y, 0.01, 0.0);
        return acc;
    };
    const Vector delta = pointwise_drift(chain, first);
    bool delta_ok = std::abs(delta(0)) <= 1e-12 && std::abs(scalar_drift(0)) <= 1e-12;
    for (int x = 1; x < 100; ++x)
        delta_ok = delta_ok && std::abs(delta(x) - 101.0 / 99.0) <= 1e-12 && std::abs(scalar_drift(x) - 101.0 / 99.0) <= 1e-9;
    v.require(delta_ok, "delta(x)=101/99, delta(0)=0");

    const double avg0 = average_drift(chain, first, q0, 0).values.front().second;
    v.require(std::abs(avg0 - 1.0) <= 1e-12, "average drift at t=0 equals 1");

    const auto pointwise = certify(chain, first, q0, 1, DriftMode::pointwise_upper);
    v.require(pointwise.certificate == CertificateKind::none && pointwise.violator_state == 0u,
              "pointwise_upper denied at state 0");
    const auto average = certify(chain, first, q0, 100'000, DriftMode::avg_upper);
    v.require(average.certificate == CertificateKind::upper_hitting && average.status == CertificateStatus::certified,
              "avg_upper certified");

    Vector d2(100);
    for (int x = 0; x < 100; ++x)
        d2(x) = closed_form_s(x);
    const DriftFunction second(d2);
    const Vector nabla = backward_drift(chain, second);
    v.require((nabla.array() - 1.0).abs().maxCoeff() <= 1e-12, "nabla identically 1");
    const auto up = certify(chain, second, q0, 1, DriftMode::backward_upper);
    const auto lo = certify(chain, second, q0, 1, DriftMode::backward_lower);
    v.require(up.certificate == CertificateKind::upper_staying && lo.certificate == CertificateKind::lower_staying,
              "staying certificates");
    v.require(up.bound_vector && lo.bound_vector && *up.bound_vector == d2 && *lo.bound_vector == d2,
              "s(x)=100(x+1) pinned");

    double mass = 0.0;
    for (int x = 0; x < 100; ++x)
        mass += delta(x) / 101.0;
    v.detail << "avg_drift_0=" << std::setprecision(12) << avg0 << " (unconditioned sum=" << mass << ")"
             << " pointwise_upper=" << to_string(pointwise.certificate) << " violator="
             << pointwise.violator_state.value_or(999) << " avg_upper=" << to_string(average.certificate)
             << " bound=" << average.bound.value_or(NAN);
}

void criterion6(Verdict &v) {
    const auto t0 = Clock::now();
    for (auto algo : {Algorithm::rsh1, Algorithm::rsh2}) {
        const auto problem = builtin_problem("square");
        SimConfig cfg;
        cfg.runs = 100'000;
        cfg.seed = kSeed;
        cfg.init = InitSpec::at(20);
        cfg.record_stride = 1000;
        const auto est = empirical_hitting_time(simulate({algo, problem, default_params(algo)}, cfg));
        const auto chain = make_chain(algo, problem);
        const double exact = algo == Algorithm::rsh1
                                 ? closed_form_h(20)
                                 : oracle::value_iteration_quad(chain.q(), chain.leak())(20);
        v.require(!est.all_censored && rel_close(est.mean, exact, 0.02), std::string(to_string(algo)) + " within 2%");
        v.detail << to_string(algo) << ": mean_tau=" << std::setprecision(7) << est.mean << " exact="
                 << std::setprecision(10) << exact << " censored=" << est.censored << " ";
    }
    const double secs = seconds_since(t0);
    v.require(secs < 120.0, "runtime under 2 min");
    v.detail << "time=" << std::setprecision(3) << secs << "s";
}

void criterion7(Verdict &v) {
    SimConfig cfg;
    cfg.runs = 10'000;
    cfg.max_iterations = 100'000;
    cfg.seed = kSeed;
    cfg.init = InitSpec::at(20);
    cfg.record_stride = 10;
    const auto stats = simulate({Algorithm::rsh1, builtin_problem("shifted_square"), default_params(Algorithm::rsh1)}, cfg);
    double peak = 0.0;
    for (const auto &[t, p] : empirical_convergence_curve(stats))
        peak = std::max(peak, p);
    v.require(peak == 0.0, "convergence probability identically 0");
    v.require(stats.censored_count == stats.runs, "all runs censored");
    v.detail << "runs=" << stats.runs << " max_probability=" << peak << " censored=" << stats.censored_count;
}

void criterion8(Verdict &v) {
    SplitMix64 rng(kSeed);
    std::size_t checks = 0, undefined_upper = 0;
    for (const auto &p : builtin_pairs()) {
        if (!p.convergent())
            continue;
        const auto chain = chain_of(p);
        for (int s = 0; s < 5; ++s) {
            const auto state = chain.non_index()[uniform_below(rng, chain.size())];
            for (const auto &b : rate_bounds_series(chain, point_mass(chain, state), {1, 10, 100, 1000})) {
                const double slack = 1e-12 * std::abs(b.exact_rate) + 1e-300;
                v.require(b.finite_lower <= b.exact_rate + slack,
                          p.name() + " lower at x=" + std::to_string(state) + " t=" + std::to_string(b.horizon));
                if (b.finite_upper)
                    v.require(b.exact_rate <= *b.finite_upper + slack,
                              p.name() + " upper at x=" + std::to_string(state) + " t=" + std::to_string(b.horizon));
                else
                    ++undefined_upper;
                ++checks;
            }
        }
    }
    v.detail << checks << " (chain, state, t) triples, upper bound undefined in " << undefined_upper;
}

void criterion9(Verdict &v) {
    struct Curve {
        std::optional<std::pair<std::uint64_t, double>> last;
        bool cutoff_ok = true;
        bool engaged = false;
    };
    auto run = [](Algorithm algo) {
        SimConfig cfg;
        cfg.runs = 100'000;
        cfg.max_iterations = 40'000;
        cfg.seed = kSeed;
        cfg.init = InitSpec::at(20);
        const auto stats = simulate({algo, builtin_problem("square"), default_params(algo)}, cfg);
        Curve c;
        const auto rate = empirical_average_rate(stats);
        for (const auto &[t, value] : rate) {
            // survivors counted straight from the per-run hitting times
            std::uint64_t alive = 0;
            for (const auto &tau : stats.hitting_times)
                alive += !tau || *tau > t;
            const double freq = static_cast<double>(alive) / static_cast<double>(stats.runs);
            const bool small = freq <= 1e-5;
            c.cutoff_ok = c.cutoff_ok && small == !value.has_value();
            if (!small && value)
                c.cutoff_ok = c.cutoff_ok && std::abs(*value + std::log(freq) / static_cast<double>(t)) <= 1e-12;
            c.engaged = c.engaged || small;
            if (value)
                c.last = std::make_pair(t, *value);
        }
        return c;
    };
    const auto elitist = run(Algorithm::rsh1);
    const auto non_elitist = run(Algorithm::rsh2);
    v.require(elitist.last && std::abs(elitist.last->second - 0.0009) <= 0.0002, "rsh1 reaches 0.0009 +- 0.0002");
    v.require(non_elitist.last && std::abs(non_elitist.last->second - 0.0004) <= 0.0002, "rsh2 reaches 0.0004 +- 0.0002");
    v.require(elitist.cutoff_ok && non_elitist.cutoff_ok, "rate absent exactly when frequency <= 1e-5");
    v.require(elitist.engaged, "cutoff engages");
    auto show = [&v](const char *name, const Curve &c) {
        v.detail << name << "=";
        if (c.last)
            v.detail << std::setprecision(4) << c.last->second << "@t=" << c.last->first;
        else
            v.detail << "undefined";
        v.detail << (c.engaged ? "(cutoff) " : " ");
    };
    show("rsh1", elitist);
    show("rsh2", non_elitist);
}

void criterion10(Verdict &v) {
    for (const auto &p : builtin_pairs()) {
        const auto chain = chain_of(p);
        if (!p.convergent()) {
            bool singular = false;
            try {
                hitting_times(chain);
            } catch (const SingularSystem &) {
                singular = true;
            }
            const double grown = oracle::value_iteration_quad(chain.q(), chain.leak(), 60)(0);
            v.require(singular && grown >= std::ldexp(1.0, 59), p.name() + " both diverge");
            v.detail << p.name() << ": h=inf ";
            continue;
        }
        const auto t = hitting_times(chain);
        const oracle::Vec ref = oracle::value_iteration_quad(chain.q(), chain.leak());
        double worst = 0.0;
        for (Eigen::Index i = 0; i < ref.size(); ++i)
            worst = std::max(worst, std::abs(t.h(i) - ref(i)) / ref(i));
        v.require(worst <= 1e-8, p.name() + " value iteration");
        const double fwd = (pointwise_drift(chain, DriftFunction(t.h)).array() - 1.0).abs().maxCoeff();
        const double bwd = (backward_drift(chain, DriftFunction(t.staying)).array() - 1.0).abs().maxCoeff();
        v.require(fwd <= 1e-8, p.name() + " pointwise_drift(h)=1");
        v.require(bwd <= 1e-8, p.name() + " backward_drift(s)=1");
        v.detail << p.name() << ": vi=" << std::setprecision(2) << worst << " fwd=" << fwd << " bwd=" << bwd << " ";
    }
}

} // namespace

int main() {
    const std::vector<std::pair<int, std::function<void(Verdict &)>>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10},
    };
    int failures = 0;
    for (const auto &[id, check] : criteria) {
        Verdict v;
        try {
            check(v);
        } catch (const std::exception &e) {
            v.pass = false;
            v.detail << "exception: " << e.what();
        }
        failures += v.pass ? 0 : 1;
        std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail.str() << std::endl;
    }
    std::cout << (10 - failures) << "/10 criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
