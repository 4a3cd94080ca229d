#pragma once

// Line-oriented run configuration: `[section]` headers and `key = value` lines, `#` comments.
// Serialization is canonical (fixed key order, 17 significant digits), so parse and serialize
// round-trip and the config hash identifies a run.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/uuid/detail/sha1.hpp>

#include "dnlfront/csv.hpp"
#include "dnlfront/error.hpp"
#include "dnlfront/model.hpp"
#include "dnlfront/pde.hpp"

namespace dnlfront {

struct ModelConfig {
    double m = 2.0;
    double p = 2.0;
    int N = 1;
    std::string reaction = "logistic";
    double k = 1.0;
    double a = 0.0;
    double q = 1.0;
};

struct WaveConfig {
    double gamma = 0.0;
    std::vector<double> gamma_grid{0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
    double tol = 1e-9;
    double rtol = 1e-10;
    double eps_hi = 1e-6;
    std::vector<double> eps_schedule{1e-4, 1e-5, 1e-6};
    double eps_floor = 1e-9;
    double margin = 0.25;
    double dxi = 0.01;
};

struct SimConfig {
    std::string geometry = "radial";
    std::string datum = "plateau";
    double R = 0.0;  // 0 sizes the domain from T and the coarse speed bound
    double dr = 0.02;
    double x_min = 0.0;
    double T = 50.0;
    double dt_sample = 0.5;
    double cfl = 0.8;
    double domain_guard = 0.9;
    std::vector<double> snapshot_times;
    DatumSpec spec{};
};

struct AnalyzeConfig {
    double window_fraction = 0.5;
    double spread_level = 0.95;
    double vanish_level = 0.01;
    double probe_fraction = 0.25;
    double tau = 1.0;
};

struct SweepConfig {
    std::string command = "simulate";
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;  // "section.key" -> values
};

struct RunConfig {
    ModelConfig model;
    WaveConfig wave;
    SimConfig sim;
    AnalyzeConfig analyze;
    SweepConfig sweep;
    std::string output_dir = "out";
    std::set<std::string> sections;  // sections present in the source file

    bool has(const std::string& s) const { return sections.count(s) > 0; }
    void require(const std::string& s) const {
        if (!has(s)) throw MissingSectionError("section [" + s + "] is required");
    }
};

namespace config_detail {

inline double parse_double(const std::string& v, int line) {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ParseError("line " + std::to_string(line) + ": '" + v + "' is not a number");
    return out;
}

inline int parse_int(const std::string& v, int line) {
    int out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ParseError("line " + std::to_string(line) + ": '" + v + "' is not an integer");
    return out;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

inline std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(parse_double(s, line));
    return out;
}

inline std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + csv::format(xs[i]);
    return s;
}

struct Entry {
    std::string section;
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, int)> set;
};

#define DNL_D(sec, name, expr)                                                                         \
    Entry { sec, name, [](const RunConfig& c) { return csv::format(c.expr); },                        \
            [](RunConfig& c, const std::string& v, int l) { c.expr = parse_double(v, l); } }
#define DNL_I(sec, name, expr)                                                                         \
    Entry { sec, name, [](const RunConfig& c) { return std::to_string(c.expr); },                     \
            [](RunConfig& c, const std::string& v, int l) { c.expr = parse_int(v, l); } }
#define DNL_S(sec, name, expr)                                                                         \
    Entry { sec, name, [](const RunConfig& c) { return c.expr; },                                     \
            [](RunConfig& c, const std::string& v, int) { c.expr = v; } }
#define DNL_L(sec, name, expr)                                                                         \
    Entry { sec, name, [](const RunConfig& c) { return join(c.expr); },                               \
            [](RunConfig& c, const std::string& v, int l) { c.expr = parse_list(v, l); } }

inline const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        DNL_D("model", "m", model.m),
        DNL_D("model", "p", model.p),
        DNL_I("model", "N", model.N),
        DNL_S("model", "reaction.kind", model.reaction),
        DNL_D("model", "reaction.k", model.k),
        DNL_D("model", "reaction.a", model.a),
        DNL_D("model", "reaction.q", model.q),
        DNL_D("wave", "gamma", wave.gamma),
        DNL_L("wave", "gamma_grid", wave.gamma_grid),
        DNL_D("wave", "tol", wave.tol),
        DNL_D("wave", "rtol", wave.rtol),
        DNL_D("wave", "eps_hi", wave.eps_hi),
        DNL_L("wave", "eps_schedule", wave.eps_schedule),
        DNL_D("wave", "eps_floor", wave.eps_floor),
        DNL_D("wave", "margin", wave.margin),
        DNL_D("wave", "dxi", wave.dxi),
        DNL_S("sim", "geometry", sim.geometry),
        DNL_S("sim", "datum", sim.datum),
        DNL_D("sim", "R", sim.R),
        DNL_D("sim", "dr", sim.dr),
        DNL_D("sim", "x_min", sim.x_min),
        DNL_D("sim", "T", sim.T),
        DNL_D("sim", "dt_sample", sim.dt_sample),
        DNL_D("sim", "cfl", sim.cfl),
        DNL_D("sim", "domain_guard", sim.domain_guard),
        DNL_L("sim", "snapshot_times", sim.snapshot_times),
        DNL_D("sim", "value", sim.spec.value),
        DNL_D("sim", "delta", sim.spec.delta),
        DNL_D("sim", "sigma", sim.spec.sigma),
        DNL_D("sim", "beta", sim.spec.beta),
        DNL_D("sim", "width", sim.spec.width),
        DNL_D("sim", "center", sim.spec.center),
        DNL_D("sim", "rho", sim.spec.rho),
        DNL_D("sim", "eta", sim.spec.eta),
        DNL_D("sim", "c", sim.spec.c),
        DNL_D("sim", "level", sim.spec.level),
        DNL_D("sim", "left", sim.spec.left),
        DNL_D("sim", "right", sim.spec.right),
        DNL_D("sim", "ramp_left", sim.spec.ramp_left),
        DNL_D("sim", "ramp_right", sim.spec.ramp_right),
        DNL_D("sim", "x0", sim.spec.x0),
        DNL_D("analyze", "window_fraction", analyze.window_fraction),
        DNL_D("analyze", "spread_level", analyze.spread_level),
        DNL_D("analyze", "vanish_level", analyze.vanish_level),
        DNL_D("analyze", "probe_fraction", analyze.probe_fraction),
        DNL_D("analyze", "tau", analyze.tau),
        DNL_S("sweep", "command", sweep.command),
        DNL_S("output", "dir", output_dir),
    };
    return table;
}

#undef DNL_D
#undef DNL_I
#undef DNL_S
#undef DNL_L

inline const Entry* find(const std::string& section, const std::string& key) {
    for (const auto& e : entries())
        if (e.section == section && e.key == key) return &e;
    return nullptr;
}

inline const std::vector<std::string>& section_order() {
    static const std::vector<std::string> order = {"model", "wave", "sim", "analyze", "sweep", "output"};
    return order;
}

}  // namespace config_detail

/// Checks values that the typed fields cannot express. RegimeError and ParseError propagate.
inline void validate_config(const RunConfig& c) {
    validate_params(c.model.m, c.model.p, c.model.N);
    if (c.model.reaction != "custom") reaction_kind_from_string(c.model.reaction);
    geometry_from_string(c.sim.geometry);
    datum_kind_from_string(c.sim.datum);
    if (c.sweep.command != "simulate" && c.sweep.command != "analyze" && c.sweep.command != "wave" &&
        c.sweep.command != "speed-curve")
        throw ParseError("sweep command must be wave, speed-curve, simulate or analyze");
    for (const auto& [name, values] : c.sweep.axes) {
        auto dot = name.find('.');
        if (dot == std::string::npos || !config_detail::find(name.substr(0, dot), name.substr(dot + 1)))
            throw UnknownKeyError("sweep axis '" + name + "' does not name a config key");
        if (values.empty()) throw ParseError("sweep axis '" + name + "' has no values");
    }
}

/**
 * @brief Parses config text. ParseError (with line number) on malformed lines or duplicates,
 * UnknownKeyError on unknown sections or keys, MissingSectionError without [model].
 */
inline RunConfig parse_config_text(const std::string& text) {
    using namespace config_detail;
    RunConfig c;
    std::set<std::string> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError("line " + std::to_string(line) + ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            const auto& order = section_order();
            if (std::find(order.begin(), order.end(), section) == order.end())
                throw UnknownKeyError("line " + std::to_string(line) + ": unknown section [" + section + "]");
            if (c.sections.count(section))
                throw ParseError("line " + std::to_string(line) + ": section [" + section + "] repeated");
            c.sections.insert(section);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("line " + std::to_string(line) + ": expected 'key = value'");
        if (section.empty()) throw ParseError("line " + std::to_string(line) + ": key outside any section");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ParseError("line " + std::to_string(line) + ": empty key");
        std::string full = section + "." + key;
        if (!seen.insert(full).second)
            throw ParseError("line " + std::to_string(line) + ": duplicate key '" + key + "' in [" + section + "]");
        if (section == "sweep" && key != "command") {
            c.sweep.axes.emplace_back(key, split_list(value));
            continue;
        }
        const Entry* e = find(section, key);
        if (!e) throw UnknownKeyError("line " + std::to_string(line) + ": unknown key '" + key + "' in [" + section + "]");
        e->set(c, value, line);
    }
    c.require("model");
    validate_config(c);
    return c;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Canonical text: every section and key in fixed order, resolved defaults included.
inline std::string serialize_config(const RunConfig& c) {
    using namespace config_detail;
    std::string out;
    for (const auto& sec : section_order()) {
        out += "[" + sec + "]\n";
        for (const auto& e : entries())
            if (e.section == sec) out += e.key + " = " + e.get(c) + "\n";
        if (sec == "sweep")
            for (const auto& [name, values] : c.sweep.axes) {
                out += name + " =";
                for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : " ") + values[i];
                out += "\n";
            }
        out += "\n";
    }
    return out;
}

/// Git-style object hash: SHA-1 of "blob <len>\0" followed by the canonical text.
inline std::string config_hash(const RunConfig& c) {
    std::string body = serialize_config(c);
    std::string data = "blob " + std::to_string(body.size()) + std::string(1, '\0') + body;
    boost::uuids::detail::sha1 sha;
    sha.process_bytes(data.data(), data.size());
    boost::uuids::detail::sha1::digest_type d;
    sha.get_digest(d);
    char buf[41];
    for (int i = 0; i < 5; ++i) std::snprintf(buf + 8 * i, 9, "%08x", d[i]);
    return std::string(buf, 40);
}

/// Applies one "section.key = value" override.
inline void apply_override(RunConfig& c, const std::string& name, const std::string& value) {
    auto dot = name.find('.');
    const config_detail::Entry* e =
        dot == std::string::npos ? nullptr : config_detail::find(name.substr(0, dot), name.substr(dot + 1));
    if (!e) throw UnknownKeyError("override '" + name + "' does not name a config key");
    e->set(c, value, 0);
    c.sections.insert(name.substr(0, dot));
}

}  // namespace dnlfront
