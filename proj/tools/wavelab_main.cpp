// wavelab: experiment driver for the radial wave laboratory.
//
//   wavelab <experiment> --config FILE [--assert] [--out DIR]
//   wavelab params --d 3 --p 3 --a -0.2
//
// Exit codes: 0 success, 2 config error, 3 numerical guard tripped,
// 4 assertion failure under --assert.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "wavelab/lab.hpp"

using namespace wavelab;

int main(int argc, char** argv) {
    CLI::App app{"wavelab: radial semilinear wave equation laboratory"};
    app.require_subcommand(0, 1);

    std::string config_file, out_dir;
    bool assert_mode = false;

    std::vector<CLI::App*> subs;
    for (const auto& name : lab::experiment_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_file, "experiment config (JSON)");
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_flag("--assert", assert_mode, "exit 4 when an in-report check fails");
        subs.push_back(sub);
    }
    // direct-flag form of `params`
    double pd = 0, pp = 0, pa = 0;
    bool have_d = false, have_p = false, have_a = false;
    {
        CLI::App* params_cmd = app.get_subcommand("params");
        params_cmd->add_option("--d", pd, "dimension")->each([&](const std::string&) { have_d = true; });
        params_cmd->add_option("--p", pp, "nonlinearity power")->each([&](const std::string&) { have_p = true; });
        params_cmd->add_option("--a", pa, "potential coefficient")->each([&](const std::string&) { have_a = true; });
    }

    CLI11_PARSE(app, argc, argv);

    if (app.get_subcommands().empty()) {
        std::cout << app.help() << "\nexperiments:\n";
        for (const auto& name : lab::experiment_names()) std::cout << "  " << name << "\n";
        return 0;
    }
    const std::string name = app.get_subcommands().front()->get_name();

    try {
        lab::json cfg;
        if (!config_file.empty()) {
            cfg = lab::load_config_file(config_file);
            if (cfg.at("experiment") != name)
                throw ConfigInvalid("/experiment", "config experiment does not match subcommand");
        } else if (name == "params" && have_d && have_p && have_a) {
            cfg = {{"experiment", "params"},
                   {"params", {{"d", static_cast<int>(pd)}, {"p", pp}, {"a", pa}}},
                   {"out_dir", out_dir.empty() ? "out" : out_dir}};
        } else {
            std::cerr << "error: --config FILE required (or --d/--p/--a for params)\n";
            return 2;
        }

        const auto man = lab::run(cfg, out_dir);

        // params prints its JSON report to stdout as well
        if (name == "params") {
            std::ifstream in((out_dir.empty() ? cfg.value("out_dir", "out")
                                              : out_dir) + std::string("/report.json"));
            std::cout << in.rdbuf();
        } else {
            std::cout << name << ": " << (man.pass ? "ok" : "CHECK FAILED")
                      << "  (config " << man.config_hash << ", "
                      << man.files.size() << " files)\n";
        }
        if (assert_mode && !man.pass) return 4;
        return 0;
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ExperimentUnknown& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const StabilityViolation& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
