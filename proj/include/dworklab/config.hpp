#pragma once

#include "counterexample.hpp"
#include "parser.hpp"

#include <fstream>
#include <sstream>

namespace dworklab {

// Either R, L, Q, S1 given outright or (rl, Q) handed to desk_instance.
struct InstanceSpec {
    bool desk = false;
    Rational R, L, Q, S1;
    std::optional<Rational> Delta0;
    Integer rl;
};

struct ExperimentConfig {
    std::optional<long> n, k, r;
    std::string form = "generate";
    std::optional<std::vector<long>> witness;
    std::vector<long> j_list;
    std::vector<InstanceSpec> instances;
    Constants constants;
    std::optional<double> s;
    std::optional<std::uint64_t> seed;
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(trim(part));
    return out;
}

inline long parse_long(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument(key + ": expected an integer, got '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument(key + ": expected a number, got '" + s + "'");
    return v;
}

}  // namespace detail

// "p", "p/q" or "b^e" with integer b, e >= 0.
inline Rational parse_rational(const std::string& text) {
    std::string s = detail::trim(text);
    if (auto caret = s.find('^'); caret != std::string::npos) {
        Integer b(detail::trim(s.substr(0, caret)));
        long e = detail::parse_long(detail::trim(s.substr(caret + 1)), s);
        if (e < 0) throw std::invalid_argument("negative exponent in '" + s + "'");
        return Rational(ipow(b, static_cast<unsigned long>(e)));
    }
    Rational r;
    if (r.set_str(s, 10) != 0 || s.empty()) throw std::invalid_argument("not a rational: '" + s + "'");
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

inline std::vector<long> parse_long_list(const std::string& s, const std::string& key) {
    std::vector<long> out;
    for (const auto& part : detail::split(s, ','))
        if (!part.empty()) out.push_back(detail::parse_long(part, key));
    return out;
}

// "rl=256,Q=16" or "R=2^40,L=2^32,Q=16,S1=2^10[,Delta0=1/2]".
inline InstanceSpec parse_instance(const std::string& s) {
    std::map<std::string, std::string> kv;
    for (const auto& part : detail::split(s, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("instance: expected key=value, got '" + part + "'");
        kv[detail::trim(part.substr(0, eq))] = detail::trim(part.substr(eq + 1));
    }
    InstanceSpec spec;
    auto take = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument("instance: missing " + key);
        std::string v = it->second;
        kv.erase(it);
        return parse_rational(v);
    };
    if (kv.count("rl")) {
        spec.desk = true;
        Rational rl = take("rl");
        if (rl.get_den() != 1) throw std::invalid_argument("instance: rl must be an integer");
        spec.rl = rl.get_num();
        spec.Q = take("Q");
    } else {
        spec.R = take("R");
        spec.L = take("L");
        spec.Q = take("Q");
        spec.S1 = take("S1");
        if (kv.count("Delta0")) spec.Delta0 = take("Delta0");
    }
    if (!kv.empty()) throw std::invalid_argument("instance: unknown key " + kv.begin()->first);
    return spec;
}

inline void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_long;
    if (key == "n") cfg.n = parse_long(value, key);
    else if (key == "k") cfg.k = parse_long(value, key);
    else if (key == "r") cfg.r = parse_long(value, key);
    else if (key == "form") cfg.form = value;
    else if (key == "witness") cfg.witness = parse_long_list(value, key);
    else if (key == "j_list") cfg.j_list = parse_long_list(value, key);
    else if (key == "instance") {
        for (const auto& part : detail::split(value, ';'))
            if (!part.empty()) cfg.instances.push_back(parse_instance(part));
    } else if (key == "s") cfg.s = parse_double(value, key);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, key));
    else if (key == "c0") cfg.constants.c0 = parse_double(value, key);
    else if (key == "c1") cfg.constants.c1 = parse_double(value, key);
    else if (key == "c2") cfg.constants.c2 = parse_double(value, key);
    else if (key == "c3") cfg.constants.c3 = parse_double(value, key);
    else if (key == "c4") cfg.constants.c4 = parse_double(value, key);
    else if (key == "c5") cfg.constants.c5 = parse_double(value, key);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

// key = value per line; '#' starts a comment; "instance" may repeat.
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        try {
            apply_config_line(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.constants.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path);
    return parse_config(in);
}

// P_k from the config: the example family or parsed text in n variables.
inline Form config_form(const ExperimentConfig& cfg) {
    if (!cfg.n || !cfg.k || !cfg.r) throw std::invalid_argument("config needs n, k and r");
    if (cfg.form == "generate") return generate_example(static_cast<std::size_t>(*cfg.n), static_cast<unsigned>(*cfg.k), static_cast<std::size_t>(*cfg.r));
    return parse_form(cfg.form, static_cast<std::size_t>(*cfg.n));
}

inline std::vector<long> config_witness(const ExperimentConfig& cfg, const Form& pk) {
    if (cfg.witness) return *cfg.witness;
    return find_derivative_witness(pk, static_cast<std::size_t>(*cfg.r)).m;
}

inline Instance resolve_instance(const InstanceSpec& spec, const ParamPlan& plan, const Form& pk,
                                 const std::vector<long>& M, const Constants& c) {
    if (spec.desk) return desk_instance(plan, pk, M, spec.rl, spec.Q, c);
    return feasible_instance(plan, spec.R, spec.L, spec.Q, spec.S1, spec.Delta0);
}

}  // namespace dworklab
