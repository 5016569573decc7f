#include "spdc/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/io.hpp"

namespace spdc {

std::string param_type_name(ParamType t)
{
    switch (t) {
    case ParamType::number: return "number";
    case ParamType::integer: return "integer";
    case ParamType::text: return "string";
    case ParamType::boolean: return "boolean";
    case ParamType::number_list: return "list of numbers";
    case ParamType::integer_list: return "list of integers";
    }
    return "?";
}

namespace {

using Check = std::function<std::string(const json&)>;

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// lo < v <= hi style checks on a scalar or every list element
Check range(double lo, double hi, bool lo_open = false, bool hi_open = false)
{
    return [=](const json& j) -> std::string {
        auto one = [&](double v) -> std::string {
            const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) &&
                            (hi_open ? v < hi : v <= hi);
            if (ok)
                return "";
            return std::string("must lie in ") + (lo_open ? "(" : "[") + num(lo) + ", " +
                   num(hi) + (hi_open ? ")" : "]");
        };
        if (j.is_array()) {
            if (j.empty())
                return "must not be empty";
            for (std::size_t i = 0; i < j.size(); ++i) {
                auto e = one(j[i].get<double>());
                if (!e.empty())
                    return "element " + std::to_string(i) + " " + e;
            }
            return "";
        }
        return one(j.get<double>());
    };
}

Check positive()
{
    return range(0.0, std::numeric_limits<double>::max(), true);
}

Check nonnegative()
{
    return range(0.0, std::numeric_limits<double>::max());
}

Check one_of(std::vector<std::string> allowed)
{
    return [allowed](const json& j) -> std::string {
        const auto v = j.get<std::string>();
        if (std::find(allowed.begin(), allowed.end(), v) != allowed.end())
            return "";
        std::string s = "must be one of";
        for (std::size_t i = 0; i < allowed.size(); ++i)
            s += (i ? " | " : " ") + allowed[i];
        return s;
    };
}

Check strictly_increasing(Check inner)
{
    return [inner](const json& j) -> std::string {
        auto e = inner(j);
        if (!e.empty())
            return e;
        for (std::size_t i = 1; i < j.size(); ++i)
            if (!(j[i].get<double>() > j[i - 1].get<double>()))
                return "must be strictly increasing (element " + std::to_string(i) + ")";
        return "";
    };
}

json range_list(double a, double b, double step)
{
    json out = json::array();
    for (double v = a; v <= b + 1e-9 * step; v += step)
        out.push_back(v);
    return out;
}

std::vector<ParamSpec> build_schema()
{
    using T = ParamType;
    json nl = json::array();
    for (int n = 100; n <= 700; n += 100)
        nl.push_back(n);
    return {
        {"temperature", T::number, 297.0, "crystal temperature (K)", range(200.0, 500.0)},
        {"design_temperature", T::number, 297.0,
         "temperature at which the poling period is designed (K)", range(200.0, 500.0)},
        {"pump_wavelength_nm", T::number, 775.0, "pump vacuum wavelength (nm)",
         range(400.0, 2000.0)},
        {"N_L", T::integer, 700, "number of domains", range(1.0, 1e6)},
        {"N_L_list", T::integer_list, nl, "domain counts of the scan",
         strictly_increasing(range(1.0, 1e6))},
        {"grid_points", T::integer, 1024, "signal frequency samples", range(65.0, 1 << 20)},
        {"grid_span", T::number, 0.5, "relative half-width of the signal band",
         range(0.0, 0.9, true)},
        {"family", T::text, "rps", "random structure family",
         one_of({"rps", "weakly-random"})},
        {"sigma", T::number, 2.1e-6, "disorder parameter of the random structures (m)",
         nonnegative()},
        {"sigma_list", T::number_list, json::array({0.0, 1e-7, 5e-7, 1e-6, 2e-6}),
         "disorder parameters of the scan (m)", strictly_increasing(nonnegative())},
        {"zeta", T::number, 2.5e6, "chirp parameter (1/m^2)", positive()},
        {"zeta_list", T::number_list, range_list(0.5e6, 5e6, 0.5e6),
         "chirp parameters of the scan (1/m^2)", strictly_increasing(positive())},
        {"match_target", T::text, "both", "matching condition",
         one_of({"equal-width", "equal-rate", "both"})},
        {"sigma_min", T::number, 0.05e-6, "lower end of the sigma search (m)", positive()},
        {"sigma_max", T::number, 4e-6, "upper end of the sigma search (m)", positive()},
        {"realizations", T::integer, 1000, "Monte Carlo realizations per grid point",
         range(2.0, 1e8)},
        {"bins", T::integer, 40, "histogram bins", range(1.0, 1e6)},
        {"fluct_sigma_list", T::number_list,
         json::array({0.5e-6, 1e-6, 1.5e-6, 2e-6, 2.5e-6}),
         "disorder parameters of the fluctuation scan (m)", strictly_increasing(positive())},
        {"fluct_realizations", T::integer, 1000, "realizations per fluctuation point",
         range(2.0, 1e8)},
        {"max_failure_fraction", T::number, 0.05,
         "tolerated fraction of realizations whose width has no half-maximum crossing",
         range(0.0, 1.0)},
        {"tau_half_span_fs", T::number, 100.0, "delay half-span of the HOM traces (fs)",
         positive()},
        {"tau_points", T::integer, 2001, "delay samples (odd puts zero on a sample)",
         range(11.0, 1e6)},
        {"sumfreq_half_span_fs", T::number, 250.0,
         "delay half-span of the sum-frequency traces (fs)", positive()},
        {"sumfreq_points", T::integer, 2049, "sum-frequency delay samples", range(11.0, 1e6)},
        {"map_pump_width", T::number, 1e-4, "pump radius of the signal maps (m)", positive()},
        {"pump_width", T::number, 1e-5, "pump radius of the correlated area (m)", positive()},
        {"pump_width_list", T::number_list,
         json::array({5e-6, 1e-5, 2e-5, 5e-5, 1e-4}), "pump radii of the width scan (m)",
         strictly_increasing(positive())},
        {"pump_band_nm", T::number, 0.1, "pump spectral band (nm)", positive()},
        {"pump_band_points", T::integer, 3, "quadrature nodes across the pump band",
         range(1.0, 64.0)},
        {"signal_points", T::integer, 128, "signal frequency samples of the maps",
         range(9.0, 1e5)},
        {"theta_s_max", T::number, 50e-3, "largest signal angle of the maps (rad)",
         range(0.0, 1.0, true)},
        {"theta_s_points", T::integer, 51, "signal angle samples", range(2.0, 1e5)},
        {"idler_points", T::integer, 25, "idler transverse quadrature points per axis",
         range(3.0, 1e4)},
        {"idler_extent", T::number, 5.0, "idler box half-width in pump standard deviations",
         positive()},
        {"profile_theta_max", T::number, 0.1,
         "half-extent of the correlated-area cut (rad)", range(0.0, 1.0, true)},
        {"profile_points", T::integer, 121, "samples per half of the cut", range(3.0, 1e5)},
        {"area_theta_points", T::integer, 48, "idler polar samples of the area map",
         range(2.0, 1e5)},
        {"area_phi_points", T::integer, 32, "idler azimuth samples of the area map",
         range(2.0, 1e5)},
        {"include_realization", T::boolean, true, "also compute one explicit realization",
         nullptr},
        {"T_list", T::number_list, range_list(284.0, 300.0, 1.0), "temperatures of the scan (K)",
         strictly_increasing(range(200.0, 500.0))},
        {"sigma_er_list", T::number_list, range_list(0.0, 5e-7, 1e-7),
         "fabrication error standard deviations (m)", strictly_increasing(nonnegative())},
        {"fab_model", T::text, "domain-length", "fabrication error model",
         one_of({"domain-length", "boundary"})},
        {"d_list", T::integer_list, json::array({1, 2, 5, 10, 35, 70, 350, 700}),
         "segment lengths in domains", strictly_increasing(range(1.0, 1e6))},
    };
}

std::vector<std::string> physics_keys()
{
    return {"temperature", "pump_wavelength_nm", "grid_points", "grid_span"};
}

std::vector<std::string> with_physics(std::vector<std::string> extra)
{
    auto k = physics_keys();
    k.insert(k.end(), extra.begin(), extra.end());
    return k;
}

std::vector<ScenarioInfo> build_catalog()
{
    const std::vector<std::string> spatial = {
        "temperature", "pump_wavelength_nm", "N_L", "family", "sigma", "zeta",
        "map_pump_width", "pump_width", "pump_width_list", "pump_band_nm",
        "pump_band_points", "signal_points", "grid_span", "theta_s_max", "theta_s_points",
        "idler_points", "idler_extent", "profile_theta_max", "profile_points",
        "area_theta_points", "area_phi_points", "include_realization"};
    return {
        {"rate-vs-NL",
         "pair rate of the random-structure ensemble versus the number of domains, one curve "
         "per disorder parameter, with a linear fit",
         with_physics({"family", "sigma_list", "N_L_list"}), json::object()},
        {"width-vs-NL",
         "signal spectral width of the random-structure ensemble versus the number of "
         "domains, one curve per disorder parameter",
         with_physics({"family", "sigma_list", "N_L_list"}), json::object()},
        {"sigma-zeta-match",
         "disorder parameter of the random ensemble that matches a chirped structure in "
         "spectral width or pair rate, versus the chirp parameter",
         with_physics({"N_L", "family", "zeta_list", "match_target", "sigma_min", "sigma_max"}),
         json::object()},
        {"histogram-study",
         "histograms of pair rate and spectral width over random realizations, and their "
         "relative fluctuations versus the disorder parameter",
         with_physics({"N_L", "family", "sigma", "realizations", "bins", "fluct_sigma_list",
                       "fluct_realizations", "max_failure_fraction"}),
         json{{"realizations", 10000}}},
        {"hom-study",
         "Hong-Ou-Mandel coincidence dips of the random ensemble, one realization and the "
         "chirped structure, with entanglement times versus the chirp parameter",
         with_physics({"N_L", "family", "sigma", "zeta", "zeta_list", "realizations",
                       "tau_half_span_fs", "tau_points", "sigma_min", "sigma_max"}),
         json::object()},
        {"sumfreq-study",
         "sum-frequency intensity traces with and without spectral phase compensation for the "
         "chirped structure, the random ensemble and one realization",
         with_physics({"N_L", "family", "sigma", "zeta", "realizations",
                       "sumfreq_half_span_fs", "sumfreq_points"}),
         json::object()},
        {"spatial-study",
         "angular-spectral signal maps, radial photon densities and idler correlated areas "
         "with the pump-width dependence of the correlated-area width",
         spatial, json::object()},
        {"temperature-scan",
         "signal spectral width versus crystal temperature for one random realization, the "
         "random ensemble and the chirped structure",
         {"design_temperature", "T_list", "pump_wavelength_nm", "grid_points", "grid_span",
          "N_L", "family", "sigma", "zeta"},
         json::object()},
        {"fab-error-scan",
         "effect of random poling fabrication errors on spectral width and pair rate of the "
         "chirped structure and one random realization",
         with_physics({"N_L", "sigma", "zeta", "sigma_er_list", "fab_model", "realizations",
                       "max_failure_fraction"}),
         json::object()},
        {"segment-scan",
         "effect of randomly permuting segments of d domains of the chirped structure on "
         "spectral width and pair rate",
         with_physics({"N_L", "zeta", "d_list", "realizations", "max_failure_fraction"}),
         json::object()},
    };
}

std::string line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out)
{
    const auto t = trim(s);
    if (t.empty())
        return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(t.c_str(), &end);
    return *end == '\0' && errno != ERANGE && std::isfinite(out);
}

bool integral(double v)
{
    return std::isfinite(v) && std::floor(v) == v && std::abs(v) < 9.007199254740992e15;
}

/// Normalizes a JSON value to the key's type; returns an empty string or the problem.
std::string normalize(const ParamSpec& spec, const json& in, json& out)
{
    const std::string want = "expected " + param_type_name(spec.type);
    auto scalar_number = [](const json& j, double& v) {
        if (!j.is_number())
            return false;
        v = j.get<double>();
        return std::isfinite(v);
    };
    switch (spec.type) {
    case ParamType::number: {
        double v;
        if (!scalar_number(in, v))
            return want;
        out = v;
        return "";
    }
    case ParamType::integer: {
        double v;
        if (!scalar_number(in, v) || !integral(v))
            return want;
        out = static_cast<std::int64_t>(v);
        return "";
    }
    case ParamType::text:
        if (!in.is_string())
            return want;
        out = in;
        return "";
    case ParamType::boolean:
        if (!in.is_boolean())
            return want;
        out = in;
        return "";
    case ParamType::number_list:
    case ParamType::integer_list: {
        if (!in.is_array())
            return want;
        out = json::array();
        for (std::size_t i = 0; i < in.size(); ++i) {
            double v;
            if (!scalar_number(in[i], v) ||
                (spec.type == ParamType::integer_list && !integral(v)))
                return want + " (element " + std::to_string(i) + ")";
            if (spec.type == ParamType::integer_list)
                out.push_back(static_cast<std::int64_t>(v));
            else
                out.push_back(v);
        }
        return "";
    }
    }
    return want;
}

void set_param(RunConfig& cfg, const ScenarioInfo& info, const std::string& key,
               const json& value, const std::string& where)
{
    const auto& spec = param_spec(key);
    json v;
    auto err = normalize(spec, value, v);
    if (err.empty() && spec.check)
        err = spec.check(v);
    if (!err.empty())
        throw ConfigError(where + "invalid value for '" + key + "': " + err);
    (void)info;
    cfg.params[key] = v;
}

[[noreturn]] void unknown_key(const std::string& key, const ScenarioInfo& info,
                              const std::string& where)
{
    std::vector<std::string> cands = info.keys;
    cands.insert(cands.end(), reserved_keys().begin(), reserved_keys().end());
    std::string msg = where + "unknown key '" + key + "' for scenario " + info.id;
    const auto s = suggest_key(key, cands);
    if (!s.empty())
        msg += " (did you mean '" + s + "'?)";
    throw ConfigError(msg);
}

std::uint64_t parse_seed(const json& j, const std::string& where)
{
    if (j.is_number_unsigned())
        return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    if (j.is_string()) {
        const auto t = trim(j.get<std::string>());
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
        if (!t.empty() && t[0] != '-' && *end == '\0' && errno != ERANGE)
            return v;
    }
    throw ConfigError(where + "invalid value for 'seed': expected a non-negative integer");
}

unsigned parse_threads(const json& j, const std::string& where)
{
    double v = -1.0;
    if (j.is_number())
        v = j.get<double>();
    else if (j.is_string() && !parse_double(j.get<std::string>(), v))
        v = -1.0;
    if (!integral(v) || v < 0.0 || v > 4096.0)
        throw ConfigError(where + "invalid value for 'threads': expected an integer in [0, 4096]");
    return static_cast<unsigned>(v);
}

} // namespace

const std::vector<ParamSpec>& parameter_schema()
{
    static const std::vector<ParamSpec> s = build_schema();
    return s;
}

const ParamSpec& param_spec(const std::string& key)
{
    for (const auto& p : parameter_schema())
        if (p.key == key)
            return p;
    throw ConfigError("unknown parameter '" + key + "'");
}

const std::vector<ScenarioInfo>& scenario_catalog()
{
    static const std::vector<ScenarioInfo> c = build_catalog();
    return c;
}

const ScenarioInfo& scenario_info(const std::string& id)
{
    for (const auto& s : scenario_catalog())
        if (s.id == id)
            return s;
    std::vector<std::string> ids;
    for (const auto& s : scenario_catalog())
        ids.push_back(s.id);
    std::string msg = "unknown scenario '" + id + "'";
    const auto sug = suggest_key(id, ids);
    if (!sug.empty())
        msg += " (did you mean '" + sug + "'?)";
    throw ConfigError(msg);
}

json default_for(const ScenarioInfo& info, const std::string& key)
{
    if (info.defaults.contains(key))
        return info.defaults.at(key);
    return param_spec(key).default_value;
}

json coerce_value(const ParamSpec& spec, const std::string& text)
{
    const std::string where = "invalid value for '" + spec.key + "': ";
    switch (spec.type) {
    case ParamType::number:
    case ParamType::integer: {
        double v;
        if (!parse_double(text, v))
            throw ConfigError(where + "expected " + param_type_name(spec.type) + ", got '" +
                              text + "'");
        return v;
    }
    case ParamType::text: return text;
    case ParamType::boolean: {
        const auto t = trim(text);
        if (t == "true" || t == "1" || t == "yes" || t == "on")
            return true;
        if (t == "false" || t == "0" || t == "no" || t == "off")
            return false;
        throw ConfigError(where + "expected boolean, got '" + text + "'");
    }
    case ParamType::number_list:
    case ParamType::integer_list: {
        json out = json::array();
        std::stringstream ss(text);
        std::string item;
        std::size_t i = 0;
        while (std::getline(ss, item, ',')) {
            double v;
            if (!parse_double(item, v))
                throw ConfigError(where + "element " + std::to_string(i) + " '" + trim(item) +
                                  "' is not a number");
            out.push_back(v);
            ++i;
        }
        return out;
    }
    }
    return text;
}

double RunConfig::number(const std::string& key) const
{
    return params.at(key).get<double>();
}

std::int64_t RunConfig::integer(const std::string& key) const
{
    return params.at(key).get<std::int64_t>();
}

std::size_t RunConfig::count(const std::string& key) const
{
    const auto v = integer(key);
    if (v < 0)
        throw ConfigError("'" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

std::string RunConfig::text(const std::string& key) const
{
    return params.at(key).get<std::string>();
}

bool RunConfig::flag(const std::string& key) const
{
    return params.at(key).get<bool>();
}

std::vector<double> RunConfig::numbers(const std::string& key) const
{
    return params.at(key).get<std::vector<double>>();
}

std::vector<std::int64_t> RunConfig::integers(const std::string& key) const
{
    return params.at(key).get<std::vector<std::int64_t>>();
}

json resolved_json(const RunConfig& c)
{
    return json{{"scenario", c.scenario}, {"seed", c.seed}, {"params", c.params}};
}

bool equivalent(const RunConfig& a, const RunConfig& b)
{
    return resolved_json(a) == resolved_json(b);
}

RunConfig parse_config_text(const std::string& text, const std::string& source,
                            const std::map<std::string, std::string>& overrides,
                            const std::string& scenario)
{
    const std::string where = source.empty() ? "" : source + ": ";
    json doc = json::object();
    if (!trim(text).empty()) {
        try {
            doc = json::parse(text, nullptr, true, true);
        } catch (const json::parse_error& e) {
            std::string msg = e.what();
            const auto c = msg.find("column");
            const auto p = c == std::string::npos ? c : msg.find(": ", c);
            if (p != std::string::npos)
                msg = msg.substr(p + 2);
            throw ConfigError(where + "parse error at " + line_col(text, e.byte ? e.byte - 1 : 0) +
                              ": " + msg);
        }
    }
    if (!doc.is_object())
        throw ConfigError(where + "config must be a JSON object");
    // a metadata document of an earlier run
    if (!doc.contains("scenario") && doc.contains("config") && doc["config"].is_object())
        doc = doc["config"];

    RunConfig cfg;
    std::string file_scenario;
    if (doc.contains("scenario")) {
        if (!doc["scenario"].is_string())
            throw ConfigError(where + "invalid value for 'scenario': expected string");
        file_scenario = doc["scenario"].get<std::string>();
    }
    if (!scenario.empty() && !file_scenario.empty() && scenario != file_scenario)
        throw ConfigError(where + "config is for scenario '" + file_scenario +
                          "' but '" + scenario + "' was requested");
    cfg.scenario = scenario.empty() ? file_scenario : scenario;
    if (cfg.scenario.empty())
        throw ConfigError(where + "no scenario given");
    const auto& info = scenario_info(cfg.scenario);

    for (const auto& key : info.keys)
        cfg.params[key] = default_for(info, key);

    // a metadata document nests the parameters under "params"
    json flat = json::object();
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (it.key() == "params" && it->is_object()) {
            for (auto p = it->begin(); p != it->end(); ++p)
                flat[p.key()] = *p;
        } else {
            flat[it.key()] = *it;
        }
    }

    auto is_key = [&](const std::string& k) {
        return std::find(info.keys.begin(), info.keys.end(), k) != info.keys.end();
    };
    for (auto it = flat.begin(); it != flat.end(); ++it) {
        const auto& k = it.key();
        if (k == "scenario")
            continue;
        if (k == "seed")
            cfg.seed = parse_seed(*it, where);
        else if (k == "threads")
            cfg.threads = parse_threads(*it, where);
        else if (k == "out_dir") {
            if (!it->is_string())
                throw ConfigError(where + "invalid value for 'out_dir': expected string");
            cfg.out_dir = it->get<std::string>();
        } else if (is_key(k))
            set_param(cfg, info, k, *it, where);
        else
            unknown_key(k, info, where);
    }

    for (const auto& [k, v] : overrides) {
        if (k == "scenario")
            continue;
        if (k == "seed")
            cfg.seed = parse_seed(json(v), "");
        else if (k == "threads")
            cfg.threads = parse_threads(json(v), "");
        else if (k == "out_dir")
            cfg.out_dir = v;
        else if (is_key(k))
            set_param(cfg, info, k, coerce_value(param_spec(k), v), "");
        else
            unknown_key(k, info, "");
    }

    if (cfg.params.contains("sigma_min") &&
        !(cfg.number("sigma_min") < cfg.number("sigma_max")))
        throw ConfigError(where + "'sigma_min' must be below 'sigma_max'");
    if (cfg.out_dir.empty())
        cfg.out_dir = default_out_dir(cfg.scenario);
    return cfg;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::map<std::string, std::string>& overrides,
                       const std::string& scenario)
{
    if (!file)
        return parse_config_text("", "", overrides, scenario);
    if (!std::filesystem::exists(*file))
        throw ConfigError("config file '" + file->string() + "' does not exist");
    std::string text;
    try {
        text = io::read_file(*file);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_config_text(text, file->string(), overrides, scenario);
}

std::size_t edit_distance(const std::string& a, const std::string& b)
{
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates)
{
    std::string best;
    std::size_t best_d = 4;
    for (const auto& c : candidates) {
        const auto d = edit_distance(key, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e))
        return 2;
    if (dynamic_cast<const IoError*>(&e))
        return 4;
    if (dynamic_cast<const DomainError*>(&e))
        return 3;
    return 3;
}

std::string error_kind(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e))
        return "config";
    if (dynamic_cast<const ParameterError*>(&e))
        return "parameter";
    if (dynamic_cast<const IoError*>(&e))
        return "io";
    if (dynamic_cast<const DomainError*>(&e))
        return "domain";
    return "numeric";
}

std::string default_out_dir(const std::string& scenario)
{
    const char* env = std::getenv("SPDCSIM_OUT_DIR");
    const std::filesystem::path base = (env && *env) ? env : "spdcsim-out";
    return (base / scenario).string();
}

} // namespace spdc
