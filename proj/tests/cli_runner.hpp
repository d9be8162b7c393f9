#pragma once

// Runs the mtsim executable through the shell for end-to-end tests.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace mtsim::testing {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

class CliRunner {
 public:
  CliRunner() {
    std::random_device rd;
    dir_ = std::filesystem::temp_directory_path() / ("mtsim-test-" + std::to_string(rd()));
    std::filesystem::create_directories(dir_);
  }
  ~CliRunner() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  CliRunner(const CliRunner&) = delete;
  CliRunner& operator=(const CliRunner&) = delete;

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  RunResult run(const std::string& args) const { return run_with_env("", args); }

  // env is a shell prefix such as "NAME=value".
  RunResult run_with_env(const std::string& env, const std::string& args) const {
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = env + " \"" + MTSIM_CLI_PATH + "\" " + args + " >\"" + out + "\" 2>\"" + err + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read(out);
    r.err = read(err);
    return r;
  }

  static std::string read(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace mtsim::testing
