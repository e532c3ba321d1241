#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rabi/analysis.hpp"
#include "rabi/commands.hpp"
#include "rabi/ed.hpp"
#include "rabi/qfi.hpp"
#include "rabi/runio.hpp"
#include "rabi/variational.hpp"

namespace {

struct SubState {
    CLI::App* sub = nullptr;
    std::string name;
    std::string config_path;
    std::map<std::string, std::string> values;  // raw CLI strings per config key
    std::map<std::string, CLI::Option*> opts;
};

constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-packet polaron toolkit for the quantum Rabi model"};
    app.require_subcommand(1);

    std::vector<std::shared_ptr<SubState>> subs;
    for (const auto& name : rabi::command_names()) {
        auto st = std::make_shared<SubState>();
        st->name = name;
        st->sub = app.add_subcommand(name);
        st->sub->add_option("--config", st->config_path,
                            "flat JSON config (a run manifest is accepted too)");
        const nlohmann::json defaults = rabi::default_config(name);
        for (auto it = defaults.begin(); it != defaults.end(); ++it) {
            const std::string key = it.key();
            st->opts[key] = st->sub->add_option("--" + key, st->values[key],
                                                "default: " + it.value().dump());
        }
        subs.push_back(st);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        for (const auto& st : subs) {
            if (!st->sub->parsed()) continue;
            nlohmann::json cfg = rabi::default_config(st->name);
            if (!st->config_path.empty()) {
                const nlohmann::json file_cfg = rabi::load_config(st->config_path);
                for (auto it = file_cfg.begin(); it != file_cfg.end(); ++it) {
                    if (!cfg.contains(it.key()))
                        throw rabi::ConfigError("unknown config key for " + st->name + ": " +
                                                it.key());
                    cfg[it.key()] = it.value();
                }
            }
            for (const auto& [key, opt] : st->opts)
                if (opt->count() > 0) cfg[key] = rabi::typed_scalar(st->values.at(key));
            return rabi::run_command(st->name, cfg);
        }
        std::cerr << "no subcommand selected\n";
        return kExitConfig;
    } catch (const rabi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rabi::CutoffTooSmallError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const rabi::StepTooLargeError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const rabi::WindowError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const rabi::AmbiguousPeakError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const rabi::DegenerateInputError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    }
}
