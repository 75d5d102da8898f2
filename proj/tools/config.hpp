#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwave/grid.hpp"

namespace qwave::cli {

/// Unknown command or key, malformed value, or a value outside the range of
/// the module it feeds. Maps to exit status 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string>& command_names();

/**
 * Resolved key = value settings for one command. Keys are "section.name".
 * Sources, later ones winning: built-in defaults, the config file
 * (INI, [section] headers), then --set overrides and dedicated flags.
 * Every key is parsed to its declared type while loading.
 */
class RunConfig {
public:
    static RunConfig load(const std::string& command, const std::optional<std::string>& path,
                          const std::vector<std::string>& overrides);

    const std::string& command() const { return command_; }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    double number(const std::string& key) const;
    int integer(const std::string& key) const;
    std::uint64_t seed(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;
    Vec3 vec3(const std::string& key) const;

    /// Every key the command reads, defaults included, as typed JSON.
    nlohmann::ordered_json echo() const;

private:
    std::string command_;
    std::map<std::string, std::string> values_;

    const std::string& raw(const std::string& key) const;
};

}  // namespace qwave::cli
