// vibtrans: command-line front end
//
//   vibtrans <twosite|quantized|fmo|sweep|estimate|validate> --config FILE
//            [--out PATH] [--format csv|json] [--seed N] [--threads N] [--quiet]

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vibtrans/config.hpp"
#include "vibtrans/run.hpp"

namespace {

using namespace vibtrans;

struct Flags {
    std::string config;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool quiet = false;
};

nlohmann::json read_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config::ConfigError("", "cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw config::ConfigError("", std::string("invalid JSON: ") + e.what());
    }
}

config::RunConfig load(const Flags& f) {
    const std::filesystem::path path = f.config;
    nlohmann::json doc = read_document(path);
    if (!doc.is_object()) throw config::ConfigError("", "expected an object");
    if (!f.out.empty() || !f.format.empty()) {
        nlohmann::json& o = doc["output"];
        if (o.is_null()) o = nlohmann::json::object();
        if (!o.is_object()) throw config::ConfigError("output", "expected an object");
        if (!f.out.empty()) o["path"] = f.out;
        if (!f.format.empty()) o["format"] = f.format;
    }
    if (f.seed) doc["seed"] = *f.seed;
    config::ParseOptions opts;
    opts.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return config::parse_config_json(doc, opts);
}

int execute(const std::string& command, const Flags& f) {
    const config::RunConfig cfg = load(f);
    if (command == "validate") {
        if (!f.quiet) {
            nlohmann::ordered_json echo;
            echo["config_hash"] = config::config_hash(cfg);
            echo["config"] = nlohmann::ordered_json::parse(config::serialize_config(cfg));
            std::cout << echo.dump(2) << "\n";
        }
        return 0;
    }
    if (command != config::model_name(cfg.model))
        throw config::ConfigError(std::string(config::model_name(cfg.model)),
                                  "config describes model '" + std::string(config::model_name(cfg.model)) +
                                      "' but the subcommand is '" + command + "'");
    run::RunOptions ro;
    ro.threads = f.threads;
    const run::RunReport report = run::run(cfg, ro);
    run::write_output(report, cfg.output);
    if (!f.quiet) {
        nlohmann::ordered_json echo;
        echo["config_hash"] = report.config_hash;
        echo["config"] = report.resolved_config;
        echo["metrics"] = report.metrics;
        echo["output"] = cfg.output.path;
        echo["wall_seconds"] = report.wall_seconds;
        std::cout << echo.dump(2) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vibrationally assisted exciton transfer simulations"};
    app.set_version_flag("--version", std::string(VIBTRANS_VERSION));
    app.require_subcommand(1);

    Flags flags;
    const char* commands[][2] = {
        {"twosite", "semiclassical donor/acceptor dynamics"},
        {"quantized", "donor/acceptor coupled to a quantized mode"},
        {"fmo", "seven-site FMO complex dynamics"},
        {"sweep", "transfer efficiency error budget"},
        {"estimate", "order-of-magnitude estimates"},
        {"validate", "parse a config and print its resolved form"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "config file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output path (overrides output.path)");
        sub->add_option("--format", flags.format, "output format (overrides output.format)")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", flags.seed, "random seed (overrides seed)");
        sub->add_option("--threads", flags.threads, "worker threads for sweeps")->check(CLI::Range(1u, 1024u));
        sub->add_flag("--quiet", flags.quiet, "suppress the report on stdout");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return execute(command, flags);
    } catch (const config::ConfigError& e) {
        std::cerr << "vibtrans: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "vibtrans: error: " << e.what() << "\n";
        return 1;
    }
}
