// depthlab <command> --config <file> [--seed N] [--out DIR] [--threads N]
#include "depthlab/depthlab.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
    const std::string commands = dl_command_names();
    CLI::App app{"Half-space depth toolkit: depth, medians, deep lines and verification suites"};
    app.set_version_flag("--version", std::string(dl_version()));

    std::string command, config, out;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("command", command, "one of: " + commands)->required();
    app.add_option("--config", config, "JSON config file")->required();
    auto* seed_opt = app.add_option("--seed", seed, "64-bit seed; overrides DEPTHLAB_SEED and the config");
    app.add_option("--out", out, "output directory");
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    dl_run_options opt{};
    opt.has_seed = seed_opt->count() > 0;
    opt.seed = seed;
    opt.threads = threads;
    opt.out_dir = out.empty() ? nullptr : out.c_str();

    int exit_code = 2;
    char message[1024] = {0};
    dl_status st = dl_run_experiment(command.c_str(), config.c_str(), &opt, &exit_code, message, sizeof message);
    if (st != DL_OK) {
        std::fprintf(stderr, "depthlab: %s\n", dl_last_error());
        return 2;
    }
    std::fprintf(exit_code == 2 ? stderr : stdout, "%s\n", message);
    return exit_code;
}
