#include "forge/config.hpp"

#include "forge/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace forge {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineNo) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            config.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineNo) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineNo) + ": empty key");
        config.sections_[section].emplace_back(key, value);
    }
    return config;
}

bool KeyValueConfig::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end())
        return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const auto& kv) { return kv.first == key; });
}

std::string KeyValueConfig::get_string(const std::string& section, const std::string& key,
                                       const std::string& fallback) const {
    const auto it = sections_.find(section);
    if (it == sections_.end())
        return fallback;
    for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit)
        if (rit->first == key)
            return rit->second;
    return fallback;
}

double KeyValueConfig::get_double(const std::string& section, const std::string& key,
                                  double fallback) const {
    if (!has(section, key))
        return fallback;
    const std::string raw = get_string(section, key, "");
    try {
        size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size())
            throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": '" + raw + "' is not a number");
    }
}

int KeyValueConfig::get_int(const std::string& section, const std::string& key,
                            int fallback) const {
    return static_cast<int>(get_int64(section, key, fallback));
}

long long KeyValueConfig::get_int64(const std::string& section, const std::string& key,
                                    long long fallback) const {
    if (!has(section, key))
        return fallback;
    const std::string raw = get_string(section, key, "");
    try {
        size_t used = 0;
        const long long v = std::stoll(raw, &used);
        if (used != raw.size())
            throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": '" + raw + "' is not an integer");
    }
}

bool KeyValueConfig::get_bool(const std::string& section, const std::string& key,
                              bool fallback) const {
    if (!has(section, key))
        return fallback;
    const std::string raw = get_string(section, key, "");
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on")
        return true;
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off")
        return false;
    throw ConfigError("[" + section + "] " + key + ": '" + raw + "' is not a boolean");
}

std::vector<std::string> KeyValueConfig::get_all(const std::string& section,
                                                 const std::string& key) const {
    std::vector<std::string> values;
    const auto it = sections_.find(section);
    if (it == sections_.end())
        return values;
    for (const auto& kv : it->second)
        if (kv.first == key)
            values.push_back(kv.second);
    return values;
}

std::vector<std::string> split_csv(const std::string& value) {
    std::vector<std::string> parts;
    std::string current;
    std::istringstream in(value);
    while (std::getline(in, current, ','))
        parts.push_back(trim(current));
    return parts;
}

} // namespace forge
