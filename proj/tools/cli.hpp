#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpfbm/report.hpp"

namespace cli {

using mpfbm::json;

// Exit code 2: the configuration is unusable.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    std::vector<std::string> failed_checks;  // empty = every assertion held
    json summary = json::object();
    std::vector<OutputFile> files;
    bool pass() const { return failed_checks.empty(); }
};

struct Command {
    std::string name;
    std::string help;
    json defaults;  // flat key -> default value; defines the accepted keys
    std::function<RunResult(const json& config, unsigned workers)> run;
};

const std::vector<Command>& commands();
const Command& find_command(const std::string& name);

// Reads a flat JSON object, or the "config" member of a manifest written by
// an earlier run (whose "subcommand" must match).
json load_config_file(const std::string& path, const std::string& subcommand);

// defaults < file < overrides. Unknown keys and type mismatches throw ConfigError.
json resolve_config(const json& defaults, const json& file, const json& overrides);

// Override text: parsed as JSON when it parses, else taken as a string.
json parse_value(const std::string& text);

std::uint64_t fnv1a(const std::string& bytes);
std::string config_hash(const std::string& subcommand, const json& config);

inline constexpr const char* version = "0.1.0";

}  // namespace cli
