#include "acda/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace acda {

namespace {

enum class ValueType { Real, Integer, Text, Bool, RealList, IntegerList };

struct KeySpec {
    ValueType type;
    const char* fallback;  // nullptr: no default
    std::function<bool(double)> in_range;
    const char* help;
};

bool positive(double v) { return v > 0.0; }
bool non_negative(double v) { return v >= 0.0; }
bool at_least_one(double v) { return v >= 1.0; }

const std::map<std::string, KeySpec, std::less<>>& registry() {
    static const std::map<std::string, KeySpec, std::less<>> keys = {
        {"nu", {ValueType::Real, "7.5e-6", positive, "diffusion coefficient"}},
        {"alpha", {ValueType::Real, "1", positive, "cubic coefficient"}},
        {"L", {ValueType::Real, "1", positive, "domain length"}},
        {"N", {ValueType::Integer, "4096", [](double v) { return v >= 8; }, "mesh intervals"}},
        {"dt", {ValueType::Real, "1e-3", positive, "time step"}},
        {"mu", {ValueType::Real, "500", positive, "relaxation parameter"}},
        {"obs", {ValueType::Text, "uniform", nullptr, "uniform | probe | layer | full"}},
        {"m", {ValueType::Integer, "100", at_least_one, "node count or probe size"}},
        {"c", {ValueType::Real, "10", non_negative, "probe speed, mesh cells per step"}},
        {"runs", {ValueType::Text, "", nullptr, "assimilate: ';'-separated kind:m list"}},
        {"seed", {ValueType::Integer, "1", non_negative, "random seed"}},
        {"seeds", {ValueType::IntegerList, "1", non_negative, "seed list for trial batches"}},
        {"nus", {ValueType::RealList, "", positive, "viscosity list"}},
        {"speeds", {ValueType::RealList, "", non_negative, "probe speed list"}},
        {"sizes", {ValueType::IntegerList, "", at_least_one, "probe size list"}},
        {"threshold", {ValueType::Real, "5e-14", positive, "convergence tolerance"}},
        {"t_end", {ValueType::Real, "50", non_negative, "final time"}},
        {"t_star", {ValueType::Real, "50", positive, "convergence time for node searches"}},
        {"time_cap", {ValueType::Real, "200", positive, "velocity sweep time cap"}},
        {"locked_factor", {ValueType::Real, "1.5", positive, "locked if time > factor * mean"}},
        {"record_every", {ValueType::Integer, "10", at_least_one, "steps between error samples"}},
        {"record_probe", {ValueType::Bool, "false", nullptr, "emit probe position column"}},
        {"snapshot_times", {ValueType::RealList, "0", non_negative, "simulate: output times"}},
        {"spin_up", {ValueType::Text, "first", nullptr, "first | capped"}},
        {"spin_up_cap", {ValueType::Real, "10", positive, "latest spin-up time"}},
        {"threads", {ValueType::Integer, "0", non_negative, "worker threads, 0 = hardware"}},
        {"input", {ValueType::Text, "", nullptr, "input CSV for fit / estimate"}},
        {"c0", {ValueType::Real, "0.1752", positive, "power-law prefactor for estimate-lambda"}},
        {"p", {ValueType::Real, "0.5289", positive, "power-law exponent for estimate-lambda"}},
        {"output_dir", {ValueType::Text, "out", nullptr, "output directory"}},
    };
    return keys;
}

const KeySpec& spec_for(std::string_view key) {
    const auto& keys = registry();
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    return it->second;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_real(std::string_view key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigError("key '" + std::string(key) + "': '" + text + "' is not a finite number");
    return v;
}

std::int64_t parse_integer(std::string_view key, const std::string& text) {
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + std::string(key) + "': '" + text + "' is not an integer");
    return v;
}

void check_range(std::string_view key, const KeySpec& spec, double v) {
    if (spec.in_range && !spec.in_range(v))
        throw ConfigError("key '" + std::string(key) + "': value " + std::to_string(v) + " out of range (" +
                          spec.help + ")");
}

void validate_value(std::string_view key, const KeySpec& spec, const std::string& value) {
    switch (spec.type) {
        case ValueType::Real: check_range(key, spec, parse_real(key, value)); break;
        case ValueType::Integer: check_range(key, spec, static_cast<double>(parse_integer(key, value))); break;
        case ValueType::Bool:
            if (value != "true" && value != "false" && value != "1" && value != "0")
                throw ConfigError("key '" + std::string(key) + "': expected true or false");
            break;
        case ValueType::RealList:
            for (const auto& item : split_list(value)) check_range(key, spec, parse_real(key, item));
            break;
        case ValueType::IntegerList:
            for (const auto& item : split_list(value))
                check_range(key, spec, static_cast<double>(parse_integer(key, item)));
            break;
        case ValueType::Text:
            if (key == "obs" && value != "uniform" && value != "probe" && value != "layer" && value != "full")
                throw ConfigError("key 'obs': expected uniform, probe, layer or full");
            if (key == "spin_up" && value != "first" && value != "capped")
                throw ConfigError("key 'spin_up': expected first or capped");
            break;
    }
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
    for (const auto& [key, spec] : registry())
        if (spec.fallback) values_[key] = spec.fallback;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
    const KeySpec& spec = spec_for(key);
    std::string v = trim(value);
    validate_value(key, spec, v);
    values_[std::string(key)] = std::move(v);
    explicit_.insert(std::string(key));
}

void ExperimentConfig::apply(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void ExperimentConfig::merge(const ExperimentConfig& other) {
    for (const auto& k : other.explicit_) {
        values_[k] = other.values_.at(k);
        explicit_.insert(k);
    }
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    ExperimentConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        try {
            cfg.apply(t);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

namespace {

const std::map<std::string, std::string, std::less<>>& presets() {
    static const std::map<std::string, std::string, std::less<>> table = {
        {"fig1", "nu=7.5e-6\nalpha=1\nseed=1\nsnapshot_times=0,2,5,8\n"},
        {"fig3", "nu=5e-5\nmu=1000\nobs=layer\nt_end=25\nseed=2\n"},
        {"fig4", "nu=5e-4\nmu=500\nobs=probe\nm=10\nc=10\nt_end=1.271\nrecord_every=1\nrecord_probe=true\n"},
        {"fig5", "nu=5e-3\nmu=500\nc=10\nt_end=50\nruns=uniform:100;probe:10;probe:20;probe:50;probe:100\n"},
        {"fig6", "nu=5e-6\nmu=500\nc=10\nt_end=50\nruns=uniform:100;probe:10;probe:20;probe:50;probe:100\n"},
        {"fig7", "mu=500\nobs=uniform\nthreshold=5e-14\nt_star=50\nspin_up=capped\nseeds=1,2,3\n"
                 "nus=1e-2,3e-3,1e-3,3e-4,1e-4\n"},
        {"fig8", "mu=1000\nobs=uniform\nthreshold=5e-14\nt_star=50\nspin_up=capped\nseeds=1,2,3\n"
                 "nus=1e-2,3e-3,1e-3,3e-4,1e-4\n"},
        {"fig9", "nu=7.5e-6\nmu=300\nm=32\nthreshold=1e-10\ntime_cap=200\nspeeds=0,32,48,64,80,96,128\n"},
        {"fig10", "nu=7.5e-6\nmu=300\nthreshold=1e-10\ntime_cap=200\nsizes=5,10,20,40\nspeeds=7,17,31,45,63\n"},
        {"desk", "N=256\nnu=1e-3\nmu=500\nt_end=20\nt_star=20\nnus=1e-2,3e-3,1e-3\nseeds=1\nspin_up=capped\n"},
    };
    return table;
}

}  // namespace

ExperimentConfig ExperimentConfig::preset(std::string_view name) {
    const auto& table = presets();
    auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown preset '" + std::string(name) + "'");
    return parse(it->second);
}

std::vector<std::string> ExperimentConfig::preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : presets()) names.push_back(k);
    return names;
}

bool ExperimentConfig::has(std::string_view key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

std::string ExperimentConfig::get_string(std::string_view key) const {
    spec_for(key);
    auto it = values_.find(key);
    return it == values_.end() ? std::string() : it->second;
}

double ExperimentConfig::get_double(std::string_view key) const {
    require({std::string(key)});
    return parse_real(key, get_string(key));
}

std::int64_t ExperimentConfig::get_int(std::string_view key) const {
    require({std::string(key)});
    return parse_integer(key, get_string(key));
}

bool ExperimentConfig::get_bool(std::string_view key) const {
    const std::string v = get_string(key);
    return v == "true" || v == "1";
}

std::vector<double> ExperimentConfig::get_doubles(std::string_view key) const {
    std::vector<double> out;
    for (const auto& item : split_list(get_string(key))) out.push_back(parse_real(key, item));
    return out;
}

std::vector<std::int64_t> ExperimentConfig::get_ints(std::string_view key) const {
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(get_string(key))) out.push_back(parse_integer(key, item));
    return out;
}

void ExperimentConfig::require(const std::vector<std::string>& keys) const {
    for (const auto& k : keys) {
        spec_for(k);
        if (!has(k)) throw ConfigError("missing required key '" + k + "'");
    }
}

SolverConfig ExperimentConfig::solver() const {
    SolverConfig c;
    c.nu = get_double("nu");
    c.alpha = get_double("alpha");
    c.domain_length = get_double("L");
    c.n_points = static_cast<std::size_t>(get_int("N"));
    c.dt = get_double("dt");
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

SpinUpPolicy ExperimentConfig::spin_up_policy() const {
    return get_string("spin_up") == "capped" ? SpinUpPolicy::LastBelowCapped : SpinUpPolicy::FirstCrossing;
}

std::string ExperimentConfig::echo() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [k, v] : values_) {
        if (v.empty()) continue;
        if (!first) out << ' ';
        first = false;
        std::string compact = v;
        std::replace(compact.begin(), compact.end(), ' ', ',');
        out << k << '=' << compact;
    }
    return out.str();
}

}  // namespace acda
