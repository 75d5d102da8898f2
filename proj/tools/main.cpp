#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace qwave::cli;
    CLI::App app{"qwave: numerical experiments for quadratic derivative wave equations"};
    std::string command;
    std::optional<std::string> config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out, suite;

    std::string names;
    for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command, "one of: " + names)->required();
    app.add_option("-c,--config", config, "INI file with [section] key = value settings");
    app.add_option("--set", overrides, "override a setting, section.key=value (repeatable)")
        ->expected(1)
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--seed", seed, "run.seed");
    app.add_option("--workers", workers, "run.workers");
    app.add_option("--out", out, "run.out, the output directory");
    app.add_option("--suite", suite, "run.suite for lemma: elliptic, hyperbolic or shell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (seed) overrides.push_back("run.seed=" + std::to_string(*seed));
    if (workers) overrides.push_back("run.workers=" + std::to_string(*workers));
    if (out) overrides.push_back("run.out=" + *out);
    if (suite) overrides.push_back("run.suite=" + *suite);

    try {
        const auto cfg = RunConfig::load(command, config, overrides);
        return run(cfg, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
