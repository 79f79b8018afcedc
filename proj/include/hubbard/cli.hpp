#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hubbard {

enum class Command { simulate, stationary, manifold, analyze, sweep };

struct JobSpec {
    Command command = Command::simulate;
    std::string config_path;
    std::string output_dir;  // overrides the config's output_dir when non-empty
    std::vector<std::string> overrides;
    unsigned threads = 1;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitIo = 3 };

Command command_from_string(const std::string& name);
std::string to_string(Command command);

// Runs one job; errors are reported on `err` and mapped to an exit code.
int run_job(const JobSpec& job, std::ostream& log, std::ostream& err);

int cmd_simulate(const JobSpec& job, std::ostream& log);
int cmd_stationary(const JobSpec& job, std::ostream& log);
int cmd_manifold(const JobSpec& job, std::ostream& log);
int cmd_analyze(const JobSpec& job, std::ostream& log);
int cmd_sweep(const JobSpec& job, std::ostream& log);

}  // namespace hubbard
