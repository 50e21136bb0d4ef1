#pragma once

#include "minsurf/errors.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <type_traits>

namespace minsurf {

/// Settings shared by all subcommands. Defaults are the member initializers.
struct RunConfig
{
    std::string surface = "clifford-torus"; // catalog name or path to an nOFF file
    int n = 3;
    int res = 64;
    int k = 8;
    double delta = 0.1;
    double tolerance = 0.02;
    double minimality_tolerance = 0.05;
    std::uint64_t seed = 0;
    std::string out;
    std::optional<double> synthetic_lambda;
    std::string mass_mode = "consistent";
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        T out{};
        if constexpr (std::is_same_v<T, int>) {
            out = std::stoi(value, &used);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            out = std::stoull(value, &used);
        } else {
            out = std::stod(value, &used);
        }
        if (used != value.size()) throw ConfigError("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
    }
}

} // namespace detail

/// Flat "key = value" lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_key_values(std::istream& in)
{
    std::map<std::string, std::string> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
        out[key] = detail::trim(line.substr(eq + 1));
    }
    return out;
}

inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value)
{
    using detail::parse_number;
    if (key == "surface") c.surface = value;
    else if (key == "n") c.n = parse_number<int>(key, value);
    else if (key == "res") c.res = parse_number<int>(key, value);
    else if (key == "k") c.k = parse_number<int>(key, value);
    else if (key == "delta") c.delta = parse_number<double>(key, value);
    else if (key == "tolerance") c.tolerance = parse_number<double>(key, value);
    else if (key == "minimality_tolerance") c.minimality_tolerance = parse_number<double>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out") c.out = value;
    else if (key == "synthetic_lambda" || key == "synthetic-lambda") c.synthetic_lambda = parse_number<double>(key, value);
    else if (key == "mass_mode") {
        if (value != "lumped" && value != "consistent") throw ConfigError("mass_mode must be lumped or consistent");
        c.mass_mode = value;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

inline void apply_config_file(RunConfig& c, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    for (const auto& [key, value] : parse_key_values(in)) apply_setting(c, key, value);
}

} // namespace minsurf
