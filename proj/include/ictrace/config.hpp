#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ictrace/common.hpp"

namespace ictrace {

/// Flat key = value configuration (TOML-like scalars and [a, b, c] lists,
/// '#' comments). Flags override file values; the resolved set is snapshotted
/// into every output directory.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = strip(line.substr(0, line.find('#')));
            if (stripped.empty()) continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw FormatError("config line " + std::to_string(line_no) +
                                  ": expected key = value");
            const std::string key = strip(stripped.substr(0, eq));
            const std::string value = strip(stripped.substr(eq + 1));
            if (key.empty())
                throw FormatError("config line " + std::to_string(line_no) + ": empty key");
            cfg.values_[key] = unquote(value);
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    long get_long(const std::string& key, long fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stol(it->second);
        } catch (const std::exception&) {
            throw FormatError("config key '" + key + "': expected integer, got '" + it->second + "'");
        }
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw FormatError("config key '" + key + "': expected number, got '" + it->second + "'");
        }
    }

    std::vector<long> get_long_list(const std::string& key, std::vector<long> fallback = {}) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<long> out;
        for (const std::string& item : split_list(it->second)) {
            try {
                out.push_back(std::stol(item));
            } catch (const std::exception&) {
                throw FormatError("config key '" + key + "': expected integer list element, got '" +
                                  item + "'");
            }
        }
        return out;
    }

    /// Resolved snapshot, keys sorted.
    std::string str() const {
        std::string out;
        for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
        return out;
    }

    /// Snapshot without keys that locate or parallelize the run rather than
    /// shaping its results, so reruns into fresh directories hash identically.
    std::string snapshot() const {
        std::string out;
        for (const auto& [key, value] : values_)
            if (key != "out" && key != "jobs") out += key + " = " + value + "\n";
        return out;
    }

private:
    static std::string strip(const std::string& s) {
        const auto begin = s.find_first_not_of(" \t\r");
        if (begin == std::string::npos) return "";
        const auto end = s.find_last_not_of(" \t\r");
        return s.substr(begin, end - begin + 1);
    }

    static std::string unquote(const std::string& s) {
        if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                              (s.front() == '\'' && s.back() == '\'')))
            return s.substr(1, s.size() - 2);
        return s;
    }

    static std::vector<std::string> split_list(const std::string& s) {
        std::string body = s;
        if (!body.empty() && body.front() == '[' && body.back() == ']')
            body = body.substr(1, body.size() - 2);
        std::vector<std::string> items;
        std::string current;
        for (char c : body + ",") {
            if (c == ',') {
                const std::string item = strip(current);
                if (!item.empty()) items.push_back(item);
                current.clear();
            } else {
                current += c;
            }
        }
        return items;
    }

    std::map<std::string, std::string> values_;
};

}  // namespace ictrace
