#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli {

struct Outcome {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI through the shell with `args` appended verbatim.
inline Outcome run(const std::string& binary, const std::string& args,
                   const std::string& env = "") {
  const auto err_file = std::filesystem::temp_directory_path() /
                        ("abcgof_stderr_" + std::to_string(::getpid()));
  const std::string command =
      env + " '" + binary + "' " + args + " 2>'" + err_file.string() + "'";
  Outcome o;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    o.out.append(buf.data(), n);
  }
  const int status = ::pclose(pipe);
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.err = slurp(err_file);
  std::filesystem::remove(err_file);
  return o;
}

}  // namespace cli
