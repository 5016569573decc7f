#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace spdc {

using json = nlohmann::json;

enum class ParamType { number, integer, text, boolean, number_list, integer_list };

std::string param_type_name(ParamType t);

struct ParamSpec {
    std::string key;
    ParamType type;
    json default_value;
    std::string help;
    /// returns an empty string when the value is acceptable, else the violated constraint
    std::function<std::string(const json&)> check;
};

struct ScenarioInfo {
    std::string id;
    std::string description;
    std::vector<std::string> keys;
    /// scenario-specific defaults that replace the schema default
    json defaults = json::object();
};

const std::vector<ScenarioInfo>& scenario_catalog();
const ScenarioInfo& scenario_info(const std::string& id);
const std::vector<ParamSpec>& parameter_schema();
const ParamSpec& param_spec(const std::string& key);
/// Schema default, or the scenario's own default when it has one.
json default_for(const ScenarioInfo& info, const std::string& key);
/// Parses a flag value string into the JSON type of the key (lists are comma separated).
json coerce_value(const ParamSpec& spec, const std::string& text);

/// Keys that are not scenario parameters.
inline const std::vector<std::string>& reserved_keys()
{
    static const std::vector<std::string> k{"scenario", "seed", "threads", "out_dir"};
    return k;
}

struct RunConfig {
    std::string scenario;
    std::uint64_t seed = 42;
    /// advisory; never changes results
    unsigned threads = 0;
    std::string out_dir;
    /// every key of the scenario, defaults applied
    json params = json::object();

    double number(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::string text(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<std::int64_t> integers(const std::string& key) const;
};

/// scenario, seed and parameters: the part that determines the outputs.
json resolved_json(const RunConfig& c);
bool equivalent(const RunConfig& a, const RunConfig& b);

/// text: config document (JSON object, or a metadata document with a "config" member).
/// overrides: key -> flag value text, applied after the file. scenario: from the command
/// line (empty if absent); must agree with the file when both are given.
RunConfig parse_config_text(const std::string& text, const std::string& source,
                            const std::map<std::string, std::string>& overrides,
                            const std::string& scenario);
RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::map<std::string, std::string>& overrides,
                       const std::string& scenario);

std::size_t edit_distance(const std::string& a, const std::string& b);
/// Closest candidate within distance 3 (ties: first in order); empty if none.
std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates);

/// 0 ok, 2 config or parameter error, 3 numeric or domain error, 4 I/O error.
int exit_code_for(const std::exception& e);
std::string error_kind(const std::exception& e);

/// Default output directory: SPDCSIM_OUT_DIR if set, else spdcsim-out, plus the scenario id.
std::string default_out_dir(const std::string& scenario);

} // namespace spdc
