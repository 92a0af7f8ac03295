// Copyright 2026 The cavityherald Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. All subcommands share one option set; a JSON config
// file supplies defaults and command-line flags override it key by key.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cavityherald/cavityherald.hpp"

namespace cavityherald::cli {

using nlohmann::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Kind { number, number_list, int_list, string, string_list, range, count };

struct KeySpec {
    const char *key;
    const char *flag;
    Kind kind;
    const char *help;
};

inline const std::vector<KeySpec> &key_specs() {
    static const std::vector<KeySpec> specs = {
        {"scheme", "--scheme", Kind::string_list,
         "fock-single, fock-double, coherent-single, coherent-double (comma list for optimize)"},
        {"x", "--x", Kind::number_list, "cooperativity g^2/(kappa gamma); comma list"},
        {"x_range", "--x-range", Kind::range, "cooperativity grid min:max:points[:log|:linear]"},
        {"N", "--N", Kind::int_list, "atoms in |1>; comma list"},
        {"omega_range", "--omega-range", Kind::range, "probe detuning grid min:max:points[:log|:linear]"},
        {"eta", "--eta", Kind::number_list, "detector efficiency; comma list for optimize"},
        {"phi", "--phi", Kind::number, "preparation angle (radians)"},
        {"n_max", "--n-max", Kind::number, "photon budget (mean incident photons)"},
        {"f_target", "--f-target", Kind::number_list, "fidelity floor; comma list for optimize"},
        {"f_spurious", "--f-spurious", Kind::number, "fraction of photons reflected by imperfections"},
        {"g", "--g", Kind::number, "raw coupling rate"},
        {"kappa_a", "--kappa-a", Kind::number, "raw input-mirror decay rate"},
        {"kappa_b", "--kappa-b", Kind::number, "raw output-mirror decay rate"},
        {"gamma", "--gamma", Kind::number, "raw atomic decay rate"},
        {"delta", "--delta", Kind::number, "raw cavity-atom detuning"},
        {"g_tilde", "--g-tilde", Kind::number, "raw counter-propagating-mode coupling"},
        {"kappa_tilde", "--kappa-tilde", Kind::number, "raw counter-propagating-mode decay rate"},
        {"seed", "--seed", Kind::count, "random seed"},
        {"samples", "--samples", Kind::count, "Monte Carlo samples"},
        {"format", "--format", Kind::string, "csv or json"},
        {"out", "--out", Kind::string, "output path (default: stdout)"},
        {"tolerance_scale", "--tolerance-scale", Kind::number, "multiply verification tolerances"},
    };
    return specs;
}

struct Range {
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;
    bool log = false;

    std::vector<double> values() const {
        if (points == 0) {
            throw UsageError("grid needs at least one point");
        }
        if (log && !(min > 0.0 && max > 0.0)) {
            throw UsageError("log-spaced grid needs positive bounds");
        }
        if (points > 1 && !(max > min)) {
            throw UsageError("grid maximum must exceed its minimum");
        }
        return log ? numerics::logspace(min, max, points) : numerics::linspace(min, max, points);
    }
};

struct RunConfig {
    std::vector<Scheme> schemes;
    std::vector<double> x;
    std::optional<Range> x_range;
    std::vector<int> atoms;
    std::optional<Range> omega_range;
    std::vector<double> eta;
    std::optional<double> phi;
    std::optional<double> n_max;
    std::vector<double> f_target;
    std::optional<double> f_spurious;
    std::optional<double> g, kappa_a, kappa_b, gamma, delta, g_tilde, kappa_tilde;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::optional<double> tolerance_scale;
};

namespace detail {

inline std::vector<std::string> split(const std::string &text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) {
        parts.push_back(item);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

inline double parse_number(const std::string &text, const std::string &key) {
    double v = 0.0;
    const char *begin = text.data();
    const char *end = begin + text.size();
    while (begin < end && *begin == ' ') {
        ++begin;
    }
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw UsageError("invalid number for " + key + ": '" + text + "'");
    }
    return v;
}

/// Convert a flag's text into the JSON value a config file would hold.
inline json flag_value(const KeySpec &spec, const std::string &text) {
    switch (spec.kind) {
    case Kind::number:
        return parse_number(text, spec.key);
    case Kind::count: {
        const double v = parse_number(text, spec.key);
        if (v < 0 || v != std::floor(v)) {
            throw UsageError(std::string(spec.key) + " must be a non-negative integer");
        }
        return static_cast<std::uint64_t>(v);
    }
    case Kind::number_list: {
        json arr = json::array();
        for (const std::string &part : split(text, ',')) {
            arr.push_back(parse_number(part, spec.key));
        }
        return arr;
    }
    case Kind::int_list: {
        json arr = json::array();
        for (const std::string &part : split(text, ',')) {
            const double v = parse_number(part, spec.key);
            if (v != std::floor(v)) {
                throw UsageError(std::string(spec.key) + " must be integers");
            }
            arr.push_back(static_cast<int>(v));
        }
        return arr;
    }
    case Kind::string_list: {
        json arr = json::array();
        for (const std::string &part : split(text, ',')) {
            arr.push_back(part);
        }
        return arr;
    }
    case Kind::string:
    case Kind::range:
        return text;
    }
    return text;
}

inline double json_number(const json &v, const std::string &key) {
    if (!v.is_number()) {
        throw UsageError(key + " must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw UsageError(key + " must be finite");
    }
    return d;
}

inline std::vector<double> json_numbers(const json &v, const std::string &key) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const json &item : v) {
            out.push_back(json_number(item, key));
        }
    } else {
        out.push_back(json_number(v, key));
    }
    return out;
}

inline Range json_range(const json &v, const std::string &key) {
    Range r;
    if (v.is_string()) {
        const std::vector<std::string> parts = split(v.get<std::string>(), ':');
        if (parts.size() < 3 || parts.size() > 4) {
            throw UsageError(key + " must look like min:max:points[:log|:linear]");
        }
        r.min = parse_number(parts[0], key);
        r.max = parse_number(parts[1], key);
        const double points = parse_number(parts[2], key);
        if (points < 1 || points != std::floor(points)) {
            throw UsageError(key + " needs a positive integer point count");
        }
        r.points = static_cast<std::size_t>(points);
        if (parts.size() == 4) {
            if (parts[3] != "log" && parts[3] != "linear") {
                throw UsageError(key + " spacing must be log or linear");
            }
            r.log = parts[3] == "log";
        }
        return r;
    }
    if (!v.is_object()) {
        throw UsageError(key + " must be a string or an object");
    }
    for (const auto &[k, item] : v.items()) {
        if (k == "min") {
            r.min = json_number(item, key + ".min");
        } else if (k == "max") {
            r.max = json_number(item, key + ".max");
        } else if (k == "points") {
            const double p = json_number(item, key + ".points");
            if (p < 1 || p != std::floor(p)) {
                throw UsageError(key + ".points must be a positive integer");
            }
            r.points = static_cast<std::size_t>(p);
        } else if (k == "spacing") {
            const std::string s = item.is_string() ? item.get<std::string>() : "";
            if (s != "log" && s != "linear") {
                throw UsageError(key + ".spacing must be log or linear");
            }
            r.log = s == "log";
        } else {
            throw UsageError("unknown key " + key + "." + k);
        }
    }
    return r;
}

}  // namespace detail

/// Build a validated RunConfig from a merged JSON document. Unknown keys are
/// rejected.
inline RunConfig config_from_json(const json &doc) {
    if (!doc.is_object()) {
        throw UsageError("configuration must be a JSON object");
    }
    RunConfig cfg;
    for (const auto &[key, v] : doc.items()) {
        auto number = [&] { return detail::json_number(v, key); };
        auto count = [&] {
            const double d = number();
            if (d < 0 || d != std::floor(d)) {
                throw UsageError(key + " must be a non-negative integer");
            }
            return static_cast<std::uint64_t>(d);
        };
        auto string = [&] {
            if (!v.is_string()) {
                throw UsageError(key + " must be a string");
            }
            return v.get<std::string>();
        };
        if (key == "scheme") {
            const json list = v.is_array() ? v : json::array({v});
            for (const json &item : list) {
                const std::optional<Scheme> s = item.is_string() ? parse_scheme(item.get<std::string>()) : std::nullopt;
                if (!s) {
                    throw UsageError("unknown scheme " + item.dump());
                }
                cfg.schemes.push_back(*s);
            }
        } else if (key == "x") {
            cfg.x = detail::json_numbers(v, key);
        } else if (key == "x_range") {
            cfg.x_range = detail::json_range(v, key);
        } else if (key == "N") {
            for (double d : detail::json_numbers(v, key)) {
                if (d != std::floor(d) || d < 0) {
                    throw UsageError("N must be non-negative integers");
                }
                cfg.atoms.push_back(static_cast<int>(d));
            }
        } else if (key == "omega_range") {
            cfg.omega_range = detail::json_range(v, key);
        } else if (key == "eta") {
            cfg.eta = detail::json_numbers(v, key);
        } else if (key == "phi") {
            cfg.phi = number();
        } else if (key == "n_max") {
            cfg.n_max = number();
        } else if (key == "f_target") {
            cfg.f_target = detail::json_numbers(v, key);
        } else if (key == "f_spurious") {
            cfg.f_spurious = number();
        } else if (key == "g") {
            cfg.g = number();
        } else if (key == "kappa_a") {
            cfg.kappa_a = number();
        } else if (key == "kappa_b") {
            cfg.kappa_b = number();
        } else if (key == "gamma") {
            cfg.gamma = number();
        } else if (key == "delta") {
            cfg.delta = number();
        } else if (key == "g_tilde") {
            cfg.g_tilde = number();
        } else if (key == "kappa_tilde") {
            cfg.kappa_tilde = number();
        } else if (key == "seed") {
            cfg.seed = count();
        } else if (key == "samples") {
            cfg.samples = count();
        } else if (key == "format") {
            cfg.format = string();
            if (*cfg.format != "csv" && *cfg.format != "json") {
                throw UsageError("format must be csv or json");
            }
        } else if (key == "out") {
            cfg.out = string();
        } else if (key == "tolerance_scale") {
            cfg.tolerance_scale = number();
        } else {
            throw UsageError("unknown configuration key '" + key + "'");
        }
    }
    return cfg;
}

namespace detail {

/// Cavity with every supplied raw rate applied and gamma normalized to 1.
/// g is left at its default unless given.
inline CavityParams base_params(const RunConfig &cfg, double eta) {
    CavityParams p;
    p.kappa_a = cfg.kappa_a.value_or(p.kappa_a);
    p.kappa_b = cfg.kappa_b.value_or(p.kappa_b);
    p.gamma = cfg.gamma.value_or(1.0);
    p.delta = cfg.delta.value_or(0.0);
    p.g_tilde = cfg.g_tilde.value_or(0.0);
    p.kappa_tilde = cfg.kappa_tilde.value_or(0.0);
    p.f = cfg.f_spurious.value_or(0.0);
    p.eta = eta;
    if (cfg.g) {
        p.g = *cfg.g;
    }
    try {
        p = p.normalized();
        p.validate();
    } catch (const DomainError &e) {
        throw UsageError(e.what());
    }
    return p;
}

inline bool consistent(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

/// Cooperativity grid from --x, --x-range or raw rates (mutually exclusive
/// except for an x that agrees with the raw rates).
inline std::vector<double> x_grid(const RunConfig &cfg, const std::optional<Range> &fallback) {
    if (!cfg.x.empty() && cfg.x_range) {
        throw UsageError("give either x or x_range, not both");
    }
    if (cfg.g) {
        const double raw_x = base_params(cfg, 1.0).cooperativity();
        if (cfg.x_range || cfg.x.size() > 1) {
            throw UsageError("raw rates fix a single cooperativity; drop the x grid");
        }
        if (cfg.x.size() == 1 && !consistent(cfg.x[0], raw_x)) {
            throw UsageError("x = " + format::number(cfg.x[0]) + " disagrees with g^2/(kappa gamma) = " +
                             format::number(raw_x));
        }
        return {raw_x};
    }
    std::vector<double> grid;
    if (!cfg.x.empty()) {
        grid = cfg.x;
    } else if (cfg.x_range) {
        grid = cfg.x_range->values();
    } else if (fallback) {
        grid = fallback->values();
    }
    if (grid.empty()) {
        throw UsageError("no cooperativity given (use --x, --x-range or raw rates)");
    }
    for (double x : grid) {
        if (!(x >= 0.0)) {
            throw UsageError("cooperativity must be non-negative");
        }
    }
    return grid;
}

inline CavityParams params_for(const RunConfig &cfg, double x, double eta) {
    const CavityParams base = base_params(cfg, eta);
    if (cfg.g) {
        return base;
    }
    CavityParams p = params_at(base, x, eta);
    try {
        p.validate();
    } catch (const DomainError &e) {
        throw UsageError(e.what());
    }
    return p;
}

inline double single(const std::vector<double> &values, double fallback, const char *key) {
    if (values.empty()) {
        return fallback;
    }
    if (values.size() != 1) {
        throw UsageError(std::string(key) + " takes a single value for this subcommand");
    }
    return values.front();
}

inline json rounded(double v) { return format::round_trip(v); }

inline json rounded(const std::optional<double> &v) { return v ? json(format::round_trip(*v)) : json(nullptr); }

inline std::string field(const std::optional<double> &v) { return v ? format::number(*v) : ""; }

/// Rows as CSV (header first) or as a JSON array of objects keyed by column.
class Table {
  public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<std::string> csv, json object) {
        csv_.push_back(std::move(csv));
        json_.push_back(std::move(object));
    }

    std::string render(const std::string &fmt) const {
        if (fmt == "json") {
            return json(json_).dump(2) + "\n";
        }
        std::string out = format::csv_line(columns_);
        for (const auto &row : csv_) {
            out += format::csv_line(row);
        }
        return out;
    }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> csv_;
    std::vector<json> json_;
};

}  // namespace detail

struct CommandOutput {
    std::string text;
    int exit_code = exit_ok;
};

inline CommandOutput cmd_response(const RunConfig &cfg) {
    const std::vector<double> xs = detail::x_grid(cfg, std::nullopt);
    const std::vector<int> atoms = cfg.atoms.empty() ? std::vector<int>{0, 1, 2} : cfg.atoms;
    detail::Table table({"x", "N", "R", "T", "lambda"});
    for (double x : xs) {
        for (int n : atoms) {
            const double r = reflection_probability(x, n);
            const double t = transmission_probability(x, n);
            const double l = scattering_loss(x, n);
            table.add({format::number(x), std::to_string(n), format::number(r), format::number(t), format::number(l)},
                      {{"x", detail::rounded(x)},
                       {"N", n},
                       {"R", detail::rounded(r)},
                       {"T", detail::rounded(t)},
                       {"lambda", detail::rounded(l)}});
        }
    }
    return {table.render(cfg.format.value_or("csv"))};
}

inline CommandOutput cmd_spectrum(const RunConfig &cfg) {
    const std::vector<double> xs = detail::x_grid(cfg, std::nullopt);
    if (xs.size() != 1) {
        throw UsageError("spectrum takes a single cooperativity");
    }
    if (cfg.atoms.size() > 1) {
        throw UsageError("spectrum takes a single N");
    }
    const int atoms = cfg.atoms.empty() ? 1 : cfg.atoms.front();
    const CavityParams params = detail::params_for(cfg, xs.front(), 1.0);
    const Range omegas = cfg.omega_range.value_or(Range{-5.0, 5.0, 201, false});
    detail::Table table({"omega", "re_r", "im_r", "re_t", "im_t", "R", "T", "lambda"});
    for (double w : omegas.values()) {
        const SpectrumPoint p = scattering_amplitudes(params, w, atoms);
        table.add({format::number(w), format::number(p.r.real()), format::number(p.r.imag()),
                   format::number(p.t.real()), format::number(p.t.imag()), format::number(p.R), format::number(p.T),
                   format::number(p.lambda)},
                  {{"omega", detail::rounded(w)},
                   {"re_r", detail::rounded(p.r.real())},
                   {"im_r", detail::rounded(p.r.imag())},
                   {"re_t", detail::rounded(p.t.real())},
                   {"im_t", detail::rounded(p.t.imag())},
                   {"R", detail::rounded(p.R)},
                   {"T", detail::rounded(p.T)},
                   {"lambda", detail::rounded(p.lambda)}});
    }
    return {table.render(cfg.format.value_or("csv"))};
}

inline CommandOutput cmd_protocol(const RunConfig &cfg) {
    if (cfg.schemes.size() != 1) {
        throw UsageError("protocol needs exactly one --scheme");
    }
    const Scheme scheme = cfg.schemes.front();
    const std::vector<double> xs = detail::x_grid(cfg, std::nullopt);
    if (xs.size() != 1) {
        throw UsageError("protocol takes a single cooperativity");
    }
    const double eta = detail::single(cfg.eta, 1.0, "eta");
    const CavityParams params = detail::params_for(cfg, xs.front(), eta);
    const bool double_click = scheme == Scheme::fock_double || scheme == Scheme::coherent_double;
    if (double_click && cfg.phi) {
        throw UsageError("double-click schemes fix phi = pi/4; drop --phi");
    }
    if (!double_click && !cfg.phi) {
        throw UsageError(std::string(scheme_name(scheme)) + " needs --phi");
    }
    if (uses_photon_budget(scheme) && !cfg.n_max) {
        throw UsageError(std::string(scheme_name(scheme)) + " needs --n-max");
    }
    if (!uses_photon_budget(scheme) && cfg.n_max) {
        throw UsageError(std::string(scheme_name(scheme)) + " has no photon budget; drop --n-max");
    }
    if (cfg.f_spurious && scheme != Scheme::fock_double) {
        throw UsageError("--f-spurious applies only to fock-double");
    }

    const double phi = double_click ? std::numbers::pi / 4 : *cfg.phi;
    SchemeOutcome out;
    std::optional<double> uncorrected;
    try {
        switch (scheme) {
        case Scheme::fock_single:
            out = fock_single(params, phi);
            break;
        case Scheme::fock_double:
            out = fock_double(params);
            break;
        case Scheme::coherent_single:
            out = coherent_single(params, phi, *cfg.n_max);
            break;
        case Scheme::coherent_double:
            out = coherent_double(params, *cfg.n_max);
            uncorrected = coherent_double_fidelity_uncorrected(params, *cfg.n_max);
            break;
        }
    } catch (const DomainError &e) {
        throw UsageError(e.what());
    }

    const std::string status = out.defined() ? "ok" : "undefined";
    const std::optional<double> n_max = uses_photon_budget(scheme) ? cfg.n_max : std::nullopt;
    const double x = params.cooperativity();
    if (cfg.format.value_or("csv") == "json") {
        json record = {{"scheme", scheme_name(scheme)},
                       {"x", detail::rounded(x)},
                       {"eta", detail::rounded(eta)},
                       {"phi", detail::rounded(phi)},
                       {"n_max", detail::rounded(n_max)},
                       {"P_s", detail::rounded(out.p_success)},
                       {"F", detail::rounded(out.fidelity)},
                       {"status", status},
                       {"p1c", detail::rounded(out.p1c)},
                       {"re_xi", detail::rounded(out.re_xi)},
                       {"F_uncorrected", detail::rounded(uncorrected)}};
        return {record.dump(2) + "\n"};
    }
    std::string text = format::csv_line({"scheme", "x", "eta", "phi", "n_max", "P_s", "F", "status", "p1c", "re_xi",
                                         "F_uncorrected"});
    text += format::csv_line({std::string(scheme_name(scheme)), format::number(x), format::number(eta),
                              format::number(phi), detail::field(n_max), format::number(out.p_success),
                              detail::field(out.fidelity), status, detail::field(out.p1c), detail::field(out.re_xi),
                              detail::field(uncorrected)});
    return {text};
}

inline CommandOutput cmd_optimize(const RunConfig &cfg) {
    if (cfg.f_target.empty()) {
        throw UsageError("optimize needs --f-target");
    }
    for (double f : cfg.f_target) {
        if (!(f > 0.5 && f < 1.0)) {
            throw UsageError("fidelity targets must lie in (0.5, 1)");
        }
    }
    if (cfg.phi || cfg.n_max) {
        throw UsageError("optimize chooses phi and n_max itself; drop --phi/--n-max");
    }
    const std::vector<Scheme> schemes =
        cfg.schemes.empty() ? std::vector<Scheme>{Scheme::fock_single, Scheme::fock_double, Scheme::coherent_single,
                                                  Scheme::coherent_double}
                            : cfg.schemes;
    const std::vector<double> etas = cfg.eta.empty() ? std::vector<double>{1.0} : cfg.eta;
    const std::vector<double> xs = detail::x_grid(cfg, Range{0.05, 2.0, 40, true});
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw UsageError("cooperativity grid must be strictly increasing");
        }
    }
    for (double eta : etas) {
        detail::base_params(cfg, eta);
    }

    detail::Table table({"x", "scheme", "eta", "F_target", "phi_opt", "n_max_opt", "P_s", "F_achieved", "status"});
    bool any_feasible = false;
    for (Scheme scheme : schemes) {
        for (double eta : etas) {
            for (double target : cfg.f_target) {
                std::vector<OptimizationResult> rows;
                if (cfg.g) {
                    OptimizationResult r = optimize(scheme, detail::params_for(cfg, xs.front(), eta), target);
                    rows.push_back(r);
                } else {
                    SweepSpec spec;
                    spec.x_grid = xs;
                    spec.eta = eta;
                    spec.f_target = target;
                    spec.scheme = scheme;
                    spec.base = detail::base_params(cfg, eta);
                    rows = sweep(spec);
                }
                for (const OptimizationResult &r : rows) {
                    any_feasible = any_feasible || r.feasible();
                    std::optional<double> phi, p_s, fid, n_max;
                    if (r.feasible()) {
                        phi = r.phi_opt;
                        p_s = r.p_success;
                        fid = r.fidelity_achieved;
                        n_max = r.n_max_opt;
                    }
                    table.add({format::number(r.x), std::string(scheme_name(r.scheme)), format::number(r.eta),
                               format::number(r.f_target), detail::field(phi), detail::field(n_max),
                               detail::field(p_s), detail::field(fid), std::string(status_name(r.status))},
                              {{"x", detail::rounded(r.x)},
                               {"scheme", scheme_name(r.scheme)},
                               {"eta", detail::rounded(r.eta)},
                               {"F_target", detail::rounded(r.f_target)},
                               {"phi_opt", detail::rounded(phi)},
                               {"n_max_opt", detail::rounded(n_max)},
                               {"P_s", detail::rounded(p_s)},
                               {"F_achieved", detail::rounded(fid)},
                               {"status", status_name(r.status)}});
                }
            }
        }
    }
    return {table.render(cfg.format.value_or("csv")), any_feasible ? exit_ok : exit_failure};
}

inline CommandOutput cmd_verify(const RunConfig &cfg) {
    VerifyOptions options;
    options.seed = cfg.seed.value_or(options.seed);
    options.samples = cfg.samples.value_or(options.samples);
    options.tolerance_scale = cfg.tolerance_scale.value_or(options.tolerance_scale);
    if (options.samples < 10000) {
        throw UsageError("verify needs at least 1e4 samples");
    }
    if (!(options.tolerance_scale >= 0.0)) {
        throw UsageError("tolerance_scale must be non-negative");
    }
    const std::vector<CheckResult> checks = run_verification(options);
    const bool passed = all_passed(checks);
    const int code = passed ? exit_ok : exit_failure;

    if (cfg.format.value_or("json") == "csv") {
        std::string text = format::csv_line({"name", "expected", "observed", "tolerance", "comparison", "pass", "note"});
        for (const CheckResult &c : checks) {
            text += format::csv_line({c.name, format::number(c.expected), format::number(c.observed),
                                      format::number(c.tolerance), comparison_name(c.comparison),
                                      c.pass ? "true" : "false", '"' + c.note + '"'});
        }
        return {text, code};
    }
    json list = json::array();
    for (const CheckResult &c : checks) {
        list.push_back({{"name", c.name},
                        {"expected", detail::rounded(c.expected)},
                        {"observed", detail::rounded(c.observed)},
                        {"tolerance", detail::rounded(c.tolerance)},
                        {"comparison", comparison_name(c.comparison)},
                        {"pass", c.pass},
                        {"note", c.note}});
    }
    json report = {{"passed", passed},
                   {"seed", options.seed},
                   {"samples", options.samples},
                   {"tolerance_scale", detail::rounded(options.tolerance_scale)},
                   {"checks", list}};
    return {report.dump(2) + "\n", code};
}

/// Run the CLI on `args` (without the program name). Output goes to `out`
/// unless --out names a file; diagnostics go to `err`.
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Heralded two-atom entanglement in an optical cavity: response, protocols, optimization, "
                 "verification"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::map<std::string, std::string> flag_text;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"response", "resonant R, T, lambda table"},
        {"spectrum", "complex reflection/transmission versus probe detuning"},
        {"protocol", "success probability and fidelity of one scheme"},
        {"optimize", "maximize success probability at a fidelity floor over a cooperativity grid"},
        {"verify", "run the oracle comparison suite"},
    };
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file");
        for (const KeySpec &spec : key_specs()) {
            sub->add_option(spec.flag, flag_text[spec.key], spec.help);
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    CLI::App *sub = app.get_subcommands().front();
    const std::string command = sub->get_name();

    CommandOutput result;
    std::optional<std::string> out_path;
    try {
        json doc = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw UsageError("cannot read config file " + config_path);
            }
            try {
                doc = json::parse(in);
            } catch (const json::parse_error &e) {
                throw UsageError(std::string("config file is not valid JSON: ") + e.what());
            }
            if (!doc.is_object()) {
                throw UsageError("configuration must be a JSON object");
            }
        }
        for (const KeySpec &spec : key_specs()) {
            if (sub->get_option(spec.flag)->count() > 0) {
                doc[spec.key] = detail::flag_value(spec, flag_text[spec.key]);
            }
        }
        const RunConfig cfg = config_from_json(doc);
        out_path = cfg.out;
        if (command == "response") {
            result = cmd_response(cfg);
        } else if (command == "spectrum") {
            result = cmd_spectrum(cfg);
        } else if (command == "protocol") {
            result = cmd_protocol(cfg);
        } else if (command == "optimize") {
            result = cmd_optimize(cfg);
        } else {
            result = cmd_verify(cfg);
        }
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    if (out_path) {
        std::ofstream file(*out_path, std::ios::binary);
        if (!file) {
            err << "error: cannot write " << *out_path << "\n";
            return exit_usage;
        }
        file << result.text;
    } else {
        out << result.text;
    }
    return result.exit_code;
}

}  // namespace cavityherald::cli
