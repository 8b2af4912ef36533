#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "machlimit/limit_harness.hpp"

namespace machlimit {

// Flat `key = value` run configuration with dotted keys.  Unknown keys are
// hard errors so misspellings cannot silently fall back to defaults.
struct RunConfig {
    int grid_n = 16;
    double epsilon = 0.1;
    double gamma = 5.0 / 3.0;
    double mu_bar = 0.1;
    double lambda_bar = 0.1;
    double kappa_bar = 0.1;
    std::string tau_rule = "linear";
    double T = 0.5;
    std::string scheme = "relax_exact_split";
    double cfl = 0.5;
    int sample_every = 10;
    int s = 2;
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    std::uint64_t seed = 42;

    TauRule tau() const {
        if (tau_rule == "linear") return tau_rule_linear;
        if (tau_rule == "sqrt") return tau_rule_sqrt;
        throw ValidationError("params.tau_rule must be 'linear' or 'sqrt', got '" + tau_rule + "'");
    }

    PhysParams params() const { return scaled_params(epsilon, mu_bar, lambda_bar, kappa_bar, gamma, tau()); }

    // Cross-checks every field against the module preconditions it feeds.
    void validate() const {
        TorusGrid probe(grid_n);
        (void)params();
        (void)scheme_from_string(scheme);
        if (!(T > 0.0)) throw ValidationError("sim.T must be positive");
        if (!(cfl > 0.0 && cfl <= 1.0)) throw ValidationError("sim.cfl must lie in (0,1]");
        if (sample_every < 1) throw ValidationError("sim.sample_every must be >= 1");
        if (s < 0 || s > kMaxDerivativeOrder)
            throw ValidationError("norms.s must lie in [0," + std::to_string(kMaxDerivativeOrder) + "]");
        if (eps_list.size() < 3) throw ValidationError("sweep.eps_list needs at least 3 entries");
        for (size_t i = 0; i < eps_list.size(); ++i) {
            if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0))
                throw ValidationError("sweep.eps_list entries must lie in (0,1)");
            if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
                throw ValidationError("sweep.eps_list must be strictly decreasing");
        }
    }

    // Fully resolved key/value pairs, embedded as provenance in every report.
    std::vector<std::pair<std::string, std::string>> resolved() const {
        std::vector<std::pair<std::string, std::string>> kv;
        auto num = [](double v) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return std::string(buf);
        };
        kv.emplace_back("grid.n", std::to_string(grid_n));
        kv.emplace_back("params.epsilon", num(epsilon));
        kv.emplace_back("params.gamma", num(gamma));
        kv.emplace_back("params.mu_bar", num(mu_bar));
        kv.emplace_back("params.lambda_bar", num(lambda_bar));
        kv.emplace_back("params.kappa_bar", num(kappa_bar));
        kv.emplace_back("params.tau_rule", tau_rule);
        kv.emplace_back("sim.T", num(T));
        kv.emplace_back("sim.scheme", scheme);
        kv.emplace_back("sim.cfl", num(cfl));
        kv.emplace_back("sim.sample_every", std::to_string(sample_every));
        kv.emplace_back("norms.s", std::to_string(s));
        std::string lst;
        for (size_t i = 0; i < eps_list.size(); ++i) lst += (i ? "," : "") + num(eps_list[i]);
        kv.emplace_back("sweep.eps_list", lst);
        kv.emplace_back("seed", std::to_string(seed));
        return kv;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

inline long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': cannot parse '" + v + "' as an integer");
    }
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string val = detail::trim(stripped.substr(eq + 1));
        if (key == "grid.n") cfg.grid_n = static_cast<int>(detail::parse_int(key, val));
        else if (key == "params.epsilon") cfg.epsilon = detail::parse_double(key, val);
        else if (key == "params.gamma") cfg.gamma = detail::parse_double(key, val);
        else if (key == "params.mu_bar") cfg.mu_bar = detail::parse_double(key, val);
        else if (key == "params.lambda_bar") cfg.lambda_bar = detail::parse_double(key, val);
        else if (key == "params.kappa_bar") cfg.kappa_bar = detail::parse_double(key, val);
        else if (key == "params.tau_rule") cfg.tau_rule = val;
        else if (key == "sim.T") cfg.T = detail::parse_double(key, val);
        else if (key == "sim.scheme") cfg.scheme = val;
        else if (key == "sim.cfl") cfg.cfl = detail::parse_double(key, val);
        else if (key == "sim.sample_every") cfg.sample_every = static_cast<int>(detail::parse_int(key, val));
        else if (key == "norms.s") cfg.s = static_cast<int>(detail::parse_int(key, val));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(key, val));
        else if (key == "sweep.eps_list") {
            cfg.eps_list.clear();
            std::istringstream ls(val);
            std::string tok;
            while (std::getline(ls, tok, ',')) {
                const std::string t = detail::trim(tok);
                if (!t.empty()) cfg.eps_list.push_back(detail::parse_double(key, t));
            }
        } else {
            throw ValidationError("unknown config key '" + key + "' (line " + std::to_string(lineno) + ")");
        }
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace machlimit
