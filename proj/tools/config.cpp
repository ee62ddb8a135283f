#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace cli {

namespace {

bool same_kind(const json& def, const json& v) {
    if (def.is_null()) return true;
    if (def.is_number_unsigned()) return v.is_number_unsigned();
    if (def.is_number_integer()) return v.is_number_integer();
    if (def.is_number()) return v.is_number();
    return def.type() == v.type();
}

std::string kind_name(const json& def) {
    if (def.is_number_unsigned()) return "non-negative integer";
    if (def.is_number_integer()) return "integer";
    if (def.is_number()) return "number";
    return def.type_name();
}

}  // namespace

json load_config_file(const std::string& path, const std::string& subcommand) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
    if (j.contains("subcommand") && j.contains("config")) {
        if (j["subcommand"] != subcommand)
            throw ConfigError("manifest " + path + " was written by '" + j["subcommand"].get<std::string>() +
                              "', not '" + subcommand + "'");
        return j["config"];
    }
    return j;
}

json resolve_config(const json& defaults, const json& file, const json& overrides) {
    json out = defaults;
    for (const json* layer : {&file, &overrides}) {
        for (auto it = layer->begin(); it != layer->end(); ++it) {
            if (!defaults.contains(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
            const json& def = defaults[it.key()];
            if (!same_kind(def, it.value()))
                throw ConfigError("config key '" + it.key() + "' must be a " + kind_name(def) + ", got " +
                                  it.value().dump());
            out[it.key()] = it.value();
        }
    }
    return out;
}

json parse_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const std::string& subcommand, const json& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(subcommand + "\n" + config.dump())));
    return buf;
}

}  // namespace cli
