#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spdc/config.hpp"
#include "spdc/errors.hpp"
#include "spdc/io.hpp"
#include "spdc/scenarios.hpp"

using namespace spdc;

namespace {

struct Common {
    std::string config;
    std::string seed;
    std::string out_dir;
    std::string threads;
    bool quiet = false;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config, "JSON config file (a metadata.json of a run works too)");
    sub->add_option("--seed", c.seed, "random seed (non-negative integer)");
    sub->add_option("--out-dir", c.out_dir,
                    "output directory (default $SPDCSIM_OUT_DIR or spdcsim-out, plus the scenario)");
    sub->add_option("--threads", c.threads, "worker threads; never changes results (0 = all cores)");
    sub->add_flag("--quiet", c.quiet, "no progress messages");
}

std::string defaults_text(const json& v)
{
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + v[i].dump();
        return s;
    }
    return v.is_string() ? v.get<std::string>() : v.dump();
}

void print_error(const std::exception& e, int code, const std::string& scenario)
{
    const json err = {{"error", {{"kind", error_kind(e)},
                                 {"message", e.what()},
                                 {"exit_code", code},
                                 {"scenario", scenario}}}};
    std::cerr << err.dump() << std::endl;
}

int run(const std::string& scenario, const Common& c,
        const std::map<std::string, std::string>& overrides)
{
    std::string label = scenario;
    try {
        auto ov = overrides;
        if (!c.seed.empty())
            ov["seed"] = c.seed;
        if (!c.threads.empty())
            ov["threads"] = c.threads;
        if (!c.out_dir.empty())
            ov["out_dir"] = c.out_dir;
        std::optional<std::filesystem::path> file;
        if (!c.config.empty())
            file = c.config;
        const auto cfg = parse_config(file, ov, scenario);
        label = cfg.scenario;
        Progress progress;
        if (!c.quiet)
            progress = [&](const std::string& msg) {
                std::cerr << "[" << cfg.scenario << "] " << msg << std::endl;
            };
        const auto result = run_scenario(cfg, progress);
        for (const auto& w : result.warnings)
            std::cerr << "[" << cfg.scenario << "] warning: " << w << std::endl;
        write_outputs(result, cfg, cfg.out_dir);
        std::cout << cfg.out_dir << std::endl;
        return 0;
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        print_error(e, code, label);
        return code;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Photon-pair spectra, temporal and spatial properties of random, weakly random "
                 "and chirped poled crystals"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    bool show_params = false;
    auto* list = app.add_subcommand("list", "list the scenarios");
    list->add_flag("--params", show_params, "also list every parameter with its default");

    Common common_run;
    std::vector<std::string> sets;
    auto* run_cmd = app.add_subcommand("run", "run the scenario named in a config file");
    add_common(run_cmd, common_run);
    run_cmd->get_option("--config")->required();
    run_cmd->add_option("--set", sets, "parameter override key=value (repeatable)");

    const auto& catalog = scenario_catalog();
    std::vector<Common> commons(catalog.size());
    std::vector<std::map<std::string, std::string>> values(catalog.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const auto& info = catalog[i];
        auto* sub = app.add_subcommand(info.id, info.description);
        add_common(sub, commons[i]);
        for (const auto& key : info.keys) {
            const auto& spec = param_spec(key);
            auto* opt = sub->add_option_function<std::string>(
                "--" + key, [&values, i, key](const std::string& v) { values[i][key] = v; },
                spec.help + " [" + param_type_name(spec.type) + ", default " +
                    defaults_text(default_for(info, key)) + "]");
            opt->type_name(spec.type == ParamType::number_list ||
                                   spec.type == ParamType::integer_list
                               ? "LIST"
                               : "VALUE");
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error(ConfigError(e.what()), 2, "");
        return 2;
    }

    if (list->parsed()) {
        for (const auto& info : catalog) {
            std::printf("%-18s %s\n", info.id.c_str(), info.description.c_str());
            if (!show_params)
                continue;
            for (const auto& key : info.keys)
                std::printf("    --%-22s %s\n", key.c_str(),
                            defaults_text(default_for(info, key)).c_str());
        }
        return 0;
    }
    if (run_cmd->parsed()) {
        std::map<std::string, std::string> ov;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0) {
                print_error(ConfigError("--set expects key=value, got '" + s + "'"), 2, "");
                return 2;
            }
            ov[s.substr(0, eq)] = s.substr(eq + 1);
        }
        return run("", common_run, ov);
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed())
            return run(catalog[i].id, commons[i], values[i]);
    return 2;
}
