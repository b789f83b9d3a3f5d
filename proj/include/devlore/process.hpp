#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace devlore {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  /// Terminated by a signal other than our own timeout kill.
  std::optional<int> signal;
  std::string stdout_text;
  std::string stderr_text;
  double seconds = 0.0;

  bool ok() const { return !timed_out && !signal && exit_code == 0; }
  /// /bin/sh reports 126 (not executable) and 127 (not found).
  bool failed_to_start() const { return !timed_out && !signal && (exit_code == 126 || exit_code == 127); }
  std::string combined_output() const { return stdout_text + stderr_text; }
};

struct ProcessOptions {
  std::filesystem::path cwd;
  std::chrono::milliseconds timeout{0};  // 0 = no limit
  std::map<std::string, std::string> extra_env;
};

/// Runs `command` under `/bin/sh -c` in its own process group, capturing both
/// streams. On timeout the whole group is killed.
ProcessResult run_shell(const std::string& command, const ProcessOptions& options);

/// Values for the command-template placeholders. Each value is shell-quoted on
/// substitution; `tests` expands to one quoted word per test id.
struct CommandVars {
  std::string workspace;
  std::vector<std::string> tests;
  std::string trace_out;
  std::string scope;
};

std::string substitute_command(const std::string& tmpl, const CommandVars& vars);

}  // namespace devlore
