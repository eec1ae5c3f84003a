#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "optrig/params.hpp"

// Flat key-value configuration with CLI-flag overrides, CSV emission, and
// machine-readable provenance sidecars. A provenance sidecar round-trips
// through the same parser, so a run can be reproduced from its outputs.

namespace optrig {

inline constexpr const char* version = "0.1.0";

class Config {
  public:
    Config() = default;

    // flat text: '# comment' lines, 'key = value' pairs
    static Config from_text(std::istream& in) {
        Config c;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string();
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            c.values_[key] = val;
        }
        return c;
    }

    // provenance sidecar: JSON object with a flat "params" map
    static Config from_json(const nlohmann::json& j) {
        Config c;
        const nlohmann::json& params = j.contains("params") ? j.at("params") : j;
        for (const auto& [key, val] : params.items()) {
            if (val.is_string())
                c.values_[key] = val.get<std::string>();
            else
                c.values_[key] = val.dump();
        }
        return c;
    }

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
            nlohmann::json j;
            in >> j;
            return from_json(j);
        }
        return from_text(in);
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    // flags win over file values
    void merge_overrides(const Config& overrides) {
        for (const auto& [k, v] : overrides.values_) values_[k] = v;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key) const {
        return parse_double(key, get_string(key));
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : parse_double(key, it->second);
    }

    long long get_int(const std::string& key, long long fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
        }
    }

    std::vector<double> get_list(const std::string& key,
                                 std::vector<double> fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        std::string token;
        std::istringstream ss(it->second);
        while (std::getline(ss, token, ','))
            if (!token.empty()) out.push_back(parse_double(key, token));
        if (out.empty())
            throw ConfigError("config key '" + key + "' must be a non-empty list");
        return out;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    static double parse_double(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' is not a number: " + s);
        }
    }

    std::map<std::string, std::string> values_;
};

// columns: normalized abscissa first; one-line header comment names units
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& unit_comment,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
        out_ << "# " << unit_comment << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
        out_.precision(17);
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
    }

    void row_mixed(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
    }

  private:
    std::ofstream out_;
};

inline nlohmann::json provenance_json(const std::string& command, const Config& cfg) {
    nlohmann::json j;
    j["tool"] = "optrig";
    j["version"] = version;
    j["command"] = command;
    j["params"] = nlohmann::json::object();
    for (const auto& [k, v] : cfg.values()) j["params"][k] = v;
    return j;
}

inline void write_provenance(const std::string& path, const std::string& command,
                             const Config& cfg) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open provenance file: " + path);
    out << provenance_json(command, cfg).dump(2) << "\n";
}

inline std::string default_output_dir() {
    const char* env = std::getenv("OPTRIG_OUTDIR");
    return env ? std::string(env) : std::string(".");
}

}  // namespace optrig
