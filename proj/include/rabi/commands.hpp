#pragma once
#include "json.hpp"

#include <string>
#include <vector>

namespace rabi {

// Flat default config per subcommand; every key is mirrored by a CLI flag.
nlohmann::json default_config(const std::string& command);

std::vector<std::string> command_names();

// All commands take the fully merged flat config and return a process exit
// code (0 ok, 4 validation failure); config/convergence problems surface as
// exceptions mapped to exit codes by the CLI layer.
int cmd_ed_sweep(const nlohmann::json& cfg);
int cmd_variational(const nlohmann::json& cfg);
int cmd_scan(const nlohmann::json& cfg);
int cmd_qfi(const nlohmann::json& cfg);
int cmd_phase_diagram(const nlohmann::json& cfg);
int cmd_fit_ed(const nlohmann::json& cfg);
int cmd_validate(const nlohmann::json& cfg);

int run_command(const std::string& command, const nlohmann::json& cfg);

}  // namespace rabi
