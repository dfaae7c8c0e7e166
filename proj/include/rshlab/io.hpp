#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rshlab/analysis.hpp"
#include "rshlab/drift.hpp"
#include "rshlab/errors.hpp"
#include "rshlab/heuristics.hpp"
#include "rshlab/simulation.hpp"

namespace rshlab::io {

using json = nlohmann::json;

inline json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    out << text;
}

// -- problem definitions ---------------------------------------------------

/// {"domain_size": n, "fitness": [...]} or {"domain_size": n, "builtin": name}.
inline ProblemSpec problem_from_json(const json &doc) {
    if (!doc.is_object())
        throw InputError("problem definition must be a JSON object");
    std::optional<std::size_t> n;
    if (doc.contains("domain_size")) {
        const auto &v = doc.at("domain_size");
        if (!v.is_number_integer() || v.get<std::int64_t>() < 2)
            throw InputError("field 'domain_size' must be an integer >= 2");
        n = v.get<std::size_t>();
    }
    const bool has_fitness = doc.contains("fitness");
    const bool has_builtin = doc.contains("builtin");
    if (has_fitness == has_builtin)
        throw InputError("exactly one of the fields 'fitness' or 'builtin' is required");
    if (has_builtin) {
        const auto &b = doc.at("builtin");
        if (!b.is_string())
            throw InputError("field 'builtin' must be a string");
        return builtin_problem(b.get<std::string>(), n.value_or(kDefaultDomainSize));
    }
    if (!n)
        throw InputError("field 'domain_size' is required with 'fitness'");
    const auto &f = doc.at("fitness");
    if (!f.is_array())
        throw InputError("field 'fitness' must be an array of numbers");
    ProblemSpec p{*n, {}};
    p.fitness_values.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i].is_number())
            throw InputError("field 'fitness[" + std::to_string(i) + "]' must be a number");
        p.fitness_values.push_back(f[i].get<double>());
    }
    if (p.fitness_values.size() != *n)
        throw InputError("field 'fitness' has " + std::to_string(p.fitness_values.size()) +
                         " entries but 'domain_size' is " + std::to_string(*n));
    for (std::size_t i = 0; i < p.fitness_values.size(); ++i)
        if (!std::isfinite(p.fitness_values[i]))
            throw InputError("field 'fitness[" + std::to_string(i) + "]' is not finite");
    return p;
}

inline json problem_to_json(const ProblemSpec &p) {
    return json{{"domain_size", p.domain_size}, {"fitness", p.fitness_values}};
}

inline ProblemSpec load_problem(const std::filesystem::path &path) {
    return problem_from_json(read_json_file(path));
}

// -- drift functions -----------------------------------------------------------

/// {"d": [...]} over the non-optimal states in ascending original order.
inline DriftFunction drift_from_json(const json &doc, std::size_t expected) {
    if (!doc.is_object() || !doc.contains("d") || !doc.at("d").is_array())
        throw InputError("drift file must be an object with an array field 'd'");
    const auto &arr = doc.at("d");
    if (arr.size() != expected)
        throw DimensionMismatch("field 'd'", expected, arr.size());
    Vector d(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw InputError("field 'd[" + std::to_string(i) + "]' must be a number");
        d(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return DriftFunction(std::move(d));
}

inline json drift_to_json(const DriftFunction &d) {
    return json{{"d", std::vector<double>(d.values().data(), d.values().data() + d.values().size())}};
}

inline DriftFunction load_drift(const std::filesystem::path &path, std::size_t expected) {
    return drift_from_json(read_json_file(path), expected);
}

// -- reports -------------------------------------------------------------------

namespace detail {

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json number_or_null(const std::optional<double> &v) {
    return v ? number_or_null(*v) : json(nullptr);
}

inline double number_or_inf(const json &v) {
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

inline std::optional<double> optional_number(const json &v) {
    if (v.is_null())
        return std::nullopt;
    return v.get<double>();
}

inline std::vector<double> to_std(const Vector &v) { return {v.data(), v.data() + v.size()}; }

inline Vector to_eigen(const std::vector<double> &v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace detail

inline json rate_bounds_to_json(const RateBounds &b) {
    json j{{"horizon", b.horizon},
           {"exact_rate", detail::number_or_null(b.exact_rate)},
           {"finite_lower", detail::number_or_null(b.finite_lower)},
           {"asymptotic_lower", detail::number_or_null(b.asymptotic_lower)},
           {"finite_upper", detail::number_or_null(b.finite_upper)},
           {"asymptotic_upper", detail::number_or_null(b.asymptotic_upper)}};
    if (b.upper_absent_reason)
        j["upper_absent_reason"] = *b.upper_absent_reason;
    return j;
}

inline RateBounds rate_bounds_from_json(const json &j) {
    RateBounds b;
    b.horizon = j.at("horizon").get<std::size_t>();
    b.exact_rate = detail::number_or_inf(j.at("exact_rate"));
    b.finite_lower = detail::number_or_inf(j.at("finite_lower"));
    b.asymptotic_lower = detail::number_or_inf(j.at("asymptotic_lower"));
    b.finite_upper = detail::optional_number(j.at("finite_upper"));
    b.asymptotic_upper = detail::optional_number(j.at("asymptotic_upper"));
    if (j.contains("upper_absent_reason"))
        b.upper_absent_reason = j.at("upper_absent_reason").get<std::string>();
    b.log_survival = -b.exact_rate * static_cast<double>(b.horizon);
    return b;
}

inline json report_to_json(const AnalysisReport &r) {
    json j;
    j["rho"] = r.rho;
    j["spectral_gap"] = r.spectral_gap;
    j["convergent"] = r.convergent;
    j["witness_k"] = r.witness_k ? json(*r.witness_k) : json(nullptr);
    j["stuck_states"] = r.stuck_states;
    j["non_index"] = r.non_index;
    j["hitting_times"] = r.hitting_times;
    j["staying_times"] = r.staying_times;
    j["init"] = r.init;
    j["mean_hitting_time"] = detail::number_or_null(r.mean_hitting_time);
    j["rate_bounds"] = r.rate_bounds() ? rate_bounds_to_json(*r.rate_bounds()) : json(nullptr);
    return j;
}

inline AnalysisReport report_from_json(const json &j) {
    AnalysisReport r;
    r.rho = j.at("rho").get<double>();
    r.spectral_gap = j.value("spectral_gap", 1.0 - r.rho);
    r.convergent = j.at("convergent").get<bool>();
    if (!j.at("witness_k").is_null())
        r.witness_k = j.at("witness_k").get<std::size_t>();
    r.stuck_states = j.value("stuck_states", std::vector<std::size_t>{});
    r.non_index = j.value("non_index", std::vector<std::size_t>{});
    r.hitting_times = j.at("hitting_times").get<std::vector<double>>();
    r.staying_times = j.at("staying_times").get<std::vector<double>>();
    r.init = j.value("init", std::string("20"));
    if (j.contains("mean_hitting_time"))
        r.mean_hitting_time = detail::optional_number(j.at("mean_hitting_time"));
    if (!j.at("rate_bounds").is_null())
        r.rate_series.push_back(rate_bounds_from_json(j.at("rate_bounds")));
    return r;
}

inline json drift_report_to_json(const DriftReport &r) {
    json avg = json::array();
    for (const auto &[t, v] : r.average_by_t)
        avg.push_back(json::array({t, detail::number_or_null(v)}));
    json j{{"mode", std::string(to_string(r.mode))},
           {"pointwise", detail::to_std(r.pointwise)},
           {"backward", detail::to_std(r.backward)},
           {"average_by_t", std::move(avg)},
           {"certificate", std::string(to_string(r.certificate))},
           {"status", std::string(to_string(r.status))},
           {"hypothesis_margin", detail::number_or_null(r.hypothesis_margin)}};
    j["bound"] = detail::number_or_null(r.bound);
    j["bound_vector"] = r.bound_vector ? json(detail::to_std(*r.bound_vector)) : json(nullptr);
    j["violator_state"] = r.violator_state ? json(*r.violator_state) : json(nullptr);
    j["violator_iteration"] = r.violator_iteration ? json(*r.violator_iteration) : json(nullptr);
    j["log_residual_mass"] = r.log_residual_mass ? detail::number_or_null(*r.log_residual_mass) : json(nullptr);
    return j;
}

inline DriftReport drift_report_from_json(const json &j) {
    DriftReport r;
    r.mode = parse_drift_mode(j.at("mode").get<std::string>());
    r.pointwise = detail::to_eigen(j.at("pointwise").get<std::vector<double>>());
    r.backward = detail::to_eigen(j.at("backward").get<std::vector<double>>());
    for (const auto &pair : j.at("average_by_t"))
        r.average_by_t.emplace_back(pair.at(0).get<std::size_t>(), detail::number_or_inf(pair.at(1)));
    const auto cert = j.at("certificate").get<std::string>();
    for (auto k : {CertificateKind::none, CertificateKind::upper_hitting, CertificateKind::lower_hitting,
                   CertificateKind::upper_staying, CertificateKind::lower_staying})
        if (to_string(k) == cert)
            r.certificate = k;
    const auto status = j.at("status").get<std::string>();
    for (auto s : {CertificateStatus::certified, CertificateStatus::horizon_limited, CertificateStatus::denied})
        if (to_string(s) == status)
            r.status = s;
    r.hypothesis_margin = detail::number_or_inf(j.at("hypothesis_margin"));
    r.bound = detail::optional_number(j.at("bound"));
    if (!j.at("bound_vector").is_null())
        r.bound_vector = detail::to_eigen(j.at("bound_vector").get<std::vector<double>>());
    if (!j.at("violator_state").is_null())
        r.violator_state = j.at("violator_state").get<std::size_t>();
    if (!j.at("violator_iteration").is_null())
        r.violator_iteration = j.at("violator_iteration").get<std::size_t>();
    if (!j.at("log_residual_mass").is_null())
        r.log_residual_mass = j.at("log_residual_mass").get<double>();
    return r;
}

// -- CSV -----------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
    if (!std::isfinite(v))
        return "";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

inline std::vector<std::vector<std::string>> read_csv(std::istream &in, const std::string &header) {
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw InputError("expected CSV header '" + header + "'");
    std::vector<std::vector<std::string>> rows;
    const auto width = split_csv(header).size();
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto cells = split_csv(line);
        if (cells.size() != width)
            throw InputError("CSV row '" + line + "' does not match header '" + header + "'");
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline std::uint64_t parse_u64(const std::string &s) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size())
            throw InputError("bad integer '" + s + "'");
        return v;
    } catch (const std::logic_error &) {
        throw InputError("bad integer '" + s + "'");
    }
}

inline std::optional<double> parse_optional_double(const std::string &s) {
    if (s.empty())
        return std::nullopt;
    try {
        return std::stod(s);
    } catch (const std::logic_error &) {
        throw InputError("bad number '" + s + "'");
    }
}

} // namespace detail

inline constexpr const char *kCurveHeader = "t,opt_count,nonopt_count";
inline constexpr const char *kTauHeader = "run,tau,censored";
inline constexpr const char *kRateHeader = "t,rate";
inline constexpr const char *kRateBoundsHeader = "t,exact_rate,finite_lower,finite_upper";

inline void write_curve_csv(std::ostream &out, const RunStats &s) {
    out << kCurveHeader << '\n';
    for (std::size_t k = 0; k < s.recorded_t.size(); ++k)
        out << s.recorded_t[k] << ',' << s.opt_counts[k] << ',' << s.nonopt_counts[k] << '\n';
}

/// Censored runs carry tau = max_iterations and censored = 1.
inline void write_tau_csv(std::ostream &out, const RunStats &s) {
    out << kTauHeader << '\n';
    for (std::size_t i = 0; i < s.hitting_times.size(); ++i) {
        const auto &tau = s.hitting_times[i];
        out << i << ',' << (tau ? *tau : s.max_iterations) << ',' << (tau ? 0 : 1) << '\n';
    }
}

inline void write_rate_csv(std::ostream &out,
                           const std::vector<std::pair<std::uint64_t, std::optional<double>>> &rate) {
    out << kRateHeader << '\n';
    for (const auto &[t, r] : rate)
        out << t << ',' << (r ? detail::fmt(*r) : std::string()) << '\n';
}

inline void write_rate_bounds_csv(std::ostream &out, const std::vector<RateBounds> &series) {
    out << kRateBoundsHeader << '\n';
    for (const auto &b : series)
        out << b.horizon << ',' << detail::fmt(b.exact_rate) << ',' << detail::fmt(b.finite_lower) << ','
            << (b.finite_upper ? detail::fmt(*b.finite_upper) : std::string()) << '\n';
}

/// Rebuilds RunStats from the curve and tau files.
inline RunStats read_run_stats(std::istream &curve, std::istream &tau) {
    RunStats s;
    for (const auto &row : detail::read_csv(curve, kCurveHeader)) {
        s.recorded_t.push_back(detail::parse_u64(row[0]));
        s.opt_counts.push_back(detail::parse_u64(row[1]));
        s.nonopt_counts.push_back(detail::parse_u64(row[2]));
    }
    std::uint64_t max_tau = 0;
    for (const auto &row : detail::read_csv(tau, kTauHeader)) {
        const auto t = detail::parse_u64(row[1]);
        const bool censored = detail::parse_u64(row[2]) != 0;
        s.hitting_times.push_back(censored ? std::nullopt : std::optional<std::uint64_t>(t));
        if (censored) {
            ++s.censored_count;
            max_tau = std::max(max_tau, t);
        }
    }
    s.runs = s.hitting_times.size();
    if (s.recorded_t.size() >= 2)
        s.record_stride = s.recorded_t[1] - s.recorded_t[0];
    s.max_iterations = s.censored_count > 0 ? max_tau : (s.recorded_t.empty() ? 0 : s.recorded_t.back());
    return s;
}

inline std::vector<std::pair<std::uint64_t, std::optional<double>>> read_rate_csv(std::istream &in) {
    std::vector<std::pair<std::uint64_t, std::optional<double>>> out;
    for (const auto &row : detail::read_csv(in, kRateHeader))
        out.emplace_back(detail::parse_u64(row[0]), detail::parse_optional_double(row[1]));
    return out;
}

struct RateBoundsRow {
    std::uint64_t t;
    double exact_rate;
    double finite_lower;
    std::optional<double> finite_upper;
};

inline std::vector<RateBoundsRow> read_rate_bounds_csv(std::istream &in) {
    std::vector<RateBoundsRow> out;
    for (const auto &row : detail::read_csv(in, kRateBoundsHeader))
        out.push_back({detail::parse_u64(row[0]), detail::parse_optional_double(row[1]).value_or(NAN),
                       detail::parse_optional_double(row[2]).value_or(NAN),
                       detail::parse_optional_double(row[3])});
    return out;
}

} // namespace rshlab::io
