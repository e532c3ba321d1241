#include "rabi/runio.hpp"

#include <gsl/gsl_version.h>

#include <Eigen/Core>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>

namespace rabi {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header.size())
        throw std::logic_error("csv row width does not match header");
    rows.push_back(std::move(cells));
}

void CsvTable::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    if (j.is_object() && j.contains("config") && j["config"].is_object())
        j = j["config"];  // manifest passed as config
    if (!j.is_object()) throw ConfigError("config must be a JSON object: " + path);
    return j;
}

nlohmann::json typed_scalar(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    try {
        std::size_t pos = 0;
        const double d = std::stod(s, &pos);
        if (pos == s.size()) {
            if (s.find_first_of(".eE") == std::string::npos && std::abs(d) < 9.0e15)
                return static_cast<long long>(std::llround(d));
            return d;
        }
    } catch (...) {
    }
    return s;
}

void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& outputs,
                    double wall_seconds) {
    nlohmann::json m;
    m["command"] = command;
    m["config"] = config;
    m["outputs"] = outputs;
    m["wall_time_s"] = wall_seconds;
    m["versions"] = {
        {"artifact", "0.1.0"},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
        {"gsl", GSL_VERSION},
#ifdef __VERSION__
        {"compiler", __VERSION__},
#endif
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << m.dump(2) << "\n";
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int k = std::min(threads, n);
    pool.reserve(k);
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace rabi
