#pragma once

#include <map>
#include <string>
#include <vector>

namespace forge {

// Plain-text "key = value" configuration with [section] headers, '#'
// comments, and repeatable keys.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    long long get_int64(const std::string& section, const std::string& key,
                        long long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    // All values recorded for a repeatable key, in file order.
    std::vector<std::string> get_all(const std::string& section, const std::string& key) const;

private:
    // section -> ordered (key, value) pairs
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

std::vector<std::string> split_csv(const std::string& value);

} // namespace forge
