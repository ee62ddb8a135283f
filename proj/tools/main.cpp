#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct SubcommandArgs {
    std::string config_path;
    std::string out = "out";
    unsigned workers = 1;
    std::vector<std::string> sets;
    std::map<std::string, std::string> keys;
};

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + p.string());
}

int run(const cli::Command& cmd, const SubcommandArgs& a) {
    using cli::json;
    json file = json::object(), over = json::object();
    if (!a.config_path.empty()) file = cli::load_config_file(a.config_path, cmd.name);
    for (const auto& s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw cli::ConfigError("--set expects key=value, got '" + s + "'");
        over[s.substr(0, eq)] = cli::parse_value(s.substr(eq + 1));
    }
    for (const auto& [k, v] : a.keys) over[k] = cli::parse_value(v);
    if (a.workers < 1) throw cli::ConfigError("--workers must be >= 1");
    const json config = cli::resolve_config(cmd.defaults, file, over);

    const std::string hash = cli::config_hash(cmd.name, config);
    const fs::path dir = fs::path(a.out) / cmd.name / hash;

    cli::RunResult res;
    try {
        res = cmd.run(config, a.workers);
    } catch (const std::invalid_argument& e) {
        throw cli::ConfigError(e.what());
    }

    fs::create_directories(dir);
    json outputs = json::array();
    for (const auto& f : res.files) {
        write_file(dir / f.name, f.content);
        outputs.push_back(f.name);
    }
    json summary = res.summary;
    summary["pass"] = res.pass();
    summary["failed_checks"] = res.failed_checks;
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    outputs.push_back("summary.json");
    const json manifest{{"subcommand", cmd.name}, {"version", cli::version}, {"config", config},
                        {"config_hash", hash},    {"workers", a.workers},     {"outputs", outputs}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    std::cout << dir.string() << "\n";
    if (!res.pass()) {
        std::cerr << cmd.name << ": assertion failed:";
        for (const auto& c : res.failed_checks) std::cerr << " " << c;
        std::cerr << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiparameter fractional Brownian motion experiments"};
    app.require_subcommand(1);
    std::map<std::string, SubcommandArgs> args;
    for (const auto& cmd : cli::commands()) {
        auto& a = args[cmd.name];
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->set_help_flag("--help", "Print this help message and exit");
        sub->add_option("--config", a.config_path, "Flat JSON config or a manifest.json from an earlier run");
        sub->add_option("--out", a.out, "Output root; results go to <out>/<subcommand>/<config hash>/");
        sub->add_option("--workers", a.workers, "Worker threads; results do not depend on it");
        sub->add_option("--set", a.sets, "key=value override (repeatable)");
        for (auto it = cmd.defaults.begin(); it != cmd.defaults.end(); ++it) {
            std::string names = "--" + it.key();
            if (it.key().find('_') != std::string::npos) {
                std::string dashed = it.key();
                std::replace(dashed.begin(), dashed.end(), '_', '-');
                names += ",--" + dashed;
            }
            sub->add_option_function<std::string>(
                names, [&a, key = it.key()](const std::string& v) { a.keys[key] = v; },
                "default " + it.value().dump());
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    for (const auto& cmd : cli::commands()) {
        if (!app.got_subcommand(cmd.name)) continue;
        try {
            return run(cmd, args[cmd.name]);
        } catch (const cli::ConfigError& e) {
            std::cerr << cmd.name << ": config error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << cmd.name << ": error: " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}
