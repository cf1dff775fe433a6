#pragma once

#include "depthlab/suites.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthlab {

// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& msg)
        : std::runtime_error(path + ": " + msg), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

const std::vector<std::string>& command_names();

// Flag overrides. Seed precedence: flag, then DEPTHLAB_SEED, then the config file.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    bool read_env = true;
};

struct RunOutcome {
    int exit_code = kExitUsage;
    std::string message;  // one-line summary or the error
    std::string csv_path;
    std::string summary_path;
    Report report;
};

// Never throws: errors become exit code 2 with the message set.
RunOutcome run_experiment(const std::string& command, const std::string& config_path, const RunOptions& opt = {});
// Same with the config given as JSON text; relative paths resolve against base_dir.
RunOutcome run_experiment_text(const std::string& command, const std::string& config_text, const std::string& base_dir,
                               const RunOptions& opt = {});

std::string format_double(double x);  // 12 significant digits
std::string csv_header();
std::string to_csv(const Report& r);

}  // namespace depthlab
