#pragma once

// Deterministic result export: CSV tables with fixed 17-significant-digit
// float formatting, FNV-1a content checksums, and JSON run manifests.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wke/common.hpp"

namespace wke {

// Shortest round-trip-exact decimal form with a fixed cap of 17 significant
// digits; identical across reruns by construction.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string render() const {
        std::string out;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out += ',';
            out += header[i];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += format_double(row[i]);
            }
            out += '\n';
        }
        return out;
    }
};

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct OutputRecord {
    std::string name;
    std::string path;
    std::size_t row_count = 0;
    std::uint64_t checksum = 0;
};

struct RunManifest {
    nlohmann::json config_echo;
    nlohmann::json derived_constants;
    std::string tool_version = "wke 1.0.0";
    bool serial_mode = true;
    std::vector<OutputRecord> outputs;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool_version"] = tool_version;
        j["serial_mode"] = serial_mode;
        j["config"] = config_echo;
        j["derived_constants"] = derived_constants;
        j["outputs"] = nlohmann::json::array();
        for (const auto& o : outputs) {
            j["outputs"].push_back({{"name", o.name},
                                    {"path", o.path},
                                    {"row_count", o.row_count},
                                    {"checksum_fnv1a", o.checksum}});
        }
        return j;
    }
};

class OutputWriter {
  public:
    explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    OutputRecord write_csv(const std::string& name, const CsvTable& table) {
        const std::string body = table.render();
        const auto path = dir_ / (name + ".csv");
        write_file(path, body);
        OutputRecord rec{name, path.string(), table.rows.size(), fnv1a(body)};
        return rec;
    }

    OutputRecord write_json(const std::string& name, const nlohmann::json& j) {
        const std::string body = j.dump(2) + "\n";
        const auto path = dir_ / (name + ".json");
        write_file(path, body);
        OutputRecord rec{name, path.string(), 0, fnv1a(body)};
        return rec;
    }

    const std::filesystem::path& dir() const { return dir_; }

  private:
    static void write_file(const std::filesystem::path& path, const std::string& body) {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw config_error("cannot open output file " + path.string());
        os << body;
    }
    std::filesystem::path dir_;
};

}  // namespace wke
