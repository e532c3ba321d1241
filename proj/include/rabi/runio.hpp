#pragma once
#include "json.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabi {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 17-significant-digit round-trippable formatting used by every CSV cell.
std::string fmt17(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
    void write(const std::string& path) const;
};

// Flat-JSON config loader; a manifest file is accepted transparently by
// unwrapping its "config" member.
nlohmann::json load_config(const std::string& path);

// Parses a CLI string into the most specific JSON scalar (bool, integer,
// number, else string).
nlohmann::json typed_scalar(const std::string& s);

void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& outputs,
                    double wall_seconds);

// Ordered-buffer parallel map: fn(i) fills slot i of a caller-owned buffer,
// so output is independent of the pool size.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace rabi
