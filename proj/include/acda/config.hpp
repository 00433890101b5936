#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acda/experiments.hpp"
#include "acda/solver.hpp"

namespace acda {

/// Raised for unknown keys, malformed values, or out-of-range parameters.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Plain-text key=value experiment parameters. Blank lines and '#' comments
/// are ignored. Every key must be registered; values are checked on insertion.
class ExperimentConfig {
public:
    ExperimentConfig();

    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::filesystem::path& path);
    /// Built-in parameter sets (fig1..fig10, desk).
    static ExperimentConfig preset(std::string_view name);
    static std::vector<std::string> preset_names();

    /// Sets a registered key; throws ConfigError on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    /// Applies "key=value".
    void apply(std::string_view assignment);
    /// Copies only the keys `other` set explicitly, so defaults never clobber.
    void merge(const ExperimentConfig& other);

    bool has(std::string_view key) const;
    bool is_explicit(std::string_view key) const { return explicit_.find(key) != explicit_.end(); }
    std::string get_string(std::string_view key) const;
    double get_double(std::string_view key) const;
    std::int64_t get_int(std::string_view key) const;
    bool get_bool(std::string_view key) const;
    std::vector<double> get_doubles(std::string_view key) const;
    std::vector<std::int64_t> get_ints(std::string_view key) const;

    /// Throws ConfigError naming the first missing key.
    void require(const std::vector<std::string>& keys) const;

    SolverConfig solver() const;
    SpinUpPolicy spin_up_policy() const;

    /// Every resolved key (defaults included) as "k=v" pairs in key order.
    std::string echo() const;
    const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::set<std::string, std::less<>> explicit_;
};

}  // namespace acda
