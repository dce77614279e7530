#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pddlwb/planner.hpp"

namespace pddlwb::planner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& plugin, const std::string& field,
                               const std::string& what) {
  throw Error(Errc::ConfigError, "plugin '" + plugin + "', field '" + field + "': " + what);
}

}  // namespace

std::vector<PlannerPlugin> load_plugins(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigError, std::string("plugin config is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::ConfigError, "plugin config must be a JSON list");

  std::vector<PlannerPlugin> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    const std::string label = "#" + std::to_string(i + 1);
    if (!entry.is_object()) config_error(label, "*", "entry must be an object");
    PlannerPlugin p;
    if (!entry.contains("name") || !entry["name"].is_string() ||
        entry["name"].get<std::string>().empty()) {
      config_error(label, "name", "must be a non-empty string");
    }
    p.name = entry["name"].get<std::string>();
    for (const auto& [key, value] : entry.items()) {
      if (key != "name" && key != "command" && key != "planSource" && key != "timeoutSeconds") {
        config_error(p.name, key, "unknown field");
      }
    }
    if (!names.insert(p.name).second) config_error(p.name, "name", "duplicate plugin name");
    if (!entry.contains("command") || !entry["command"].is_string()) {
      config_error(p.name, "command", "must be a string");
    }
    p.command_template = entry["command"].get<std::string>();
    for (const char* placeholder : {"{domain}", "{problem}"}) {
      if (p.command_template.find(placeholder) == std::string::npos) {
        config_error(p.name, "command", std::string("missing ") + placeholder);
      }
    }
    if (entry.contains("planSource")) {
      const json& src = entry["planSource"];
      if (src == "stdout") {
        p.plan_source = PlanSource::Stdout;
      } else if (src == "file") {
        p.plan_source = PlanSource::File;
      } else {
        config_error(p.name, "planSource", "must be \"stdout\" or \"file\"");
      }
    }
    if (p.plan_source == PlanSource::File &&
        p.command_template.find("{plan_out}") == std::string::npos) {
      config_error(p.name, "command", "planSource file requires {plan_out}");
    }
    if (entry.contains("timeoutSeconds")) {
      const json& t = entry["timeoutSeconds"];
      if (!t.is_number() || !(t.get<double>() > 0)) {
        config_error(p.name, "timeoutSeconds", "must be a positive number");
      }
      p.timeout_seconds = t.get<double>();
    }
    out.push_back(std::move(p));
  }
  return out;
}

const PlannerPlugin& find_plugin(const std::vector<PlannerPlugin>& plugins,
                                 std::string_view name) {
  for (const auto& p : plugins) {
    if (p.name == name) return p;
  }
  throw Error(Errc::ConfigError, "no planner plugin named '" + std::string(name) + "'");
}

pddl::Plan extract_plan(std::string_view output) {
  std::string kept;
  std::istringstream is{std::string(output)};
  std::string line;
  while (std::getline(is, line)) {
    if (auto semi = line.find(';'); semi != std::string::npos) line.erase(semi);
    const auto open = line.find('(');
    const auto close = line.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) continue;
    kept += line.substr(open, close - open + 1);
    kept += '\n';
  }
  if (kept.empty()) throw Error(Errc::NoPlanInOutput, "planner output holds no plan steps");
  return pddl::parse_plan(kept);
}

namespace {

class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "pddlwb-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw Error(Errc::SpawnError, std::string("cannot create temporary directory: ") +
                                        std::strerror(errno));
    }
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::SpawnError, "cannot write " + path.string());
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string substitute(std::string cmd, std::string_view key, const std::string& value) {
  for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size())) {
    cmd.replace(pos, key.size(), value);
  }
  return cmd;
}

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fds_.data(), O_CLOEXEC) != 0) {
      throw Error(Errc::SpawnError, std::string("pipe: ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() { close_fd(fds_[0]); }
  void close_write() { close_fd(fds_[1]); }

 private:
  static void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  std::array<int, 2> fds_{-1, -1};
};

struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

ProcessResult run_shell(const std::string& command, double timeout_seconds) {
  Pipe out_pipe;
  Pipe err_pipe;
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(Errc::SpawnError, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out_pipe.write_end(), STDOUT_FILENO);
    ::dup2(err_pipe.write_end(), STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  out_pipe.close_write();
  err_pipe.close_write();

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(timeout_seconds));
  ProcessResult result;
  std::array<pollfd, 2> fds{pollfd{out_pipe.read_end(), POLLIN, 0},
                            pollfd{err_pipe.read_end(), POLLIN, 0}};
  std::array<std::string*, 2> sinks{&result.out, &result.err};
  int open_streams = 2;
  bool timed_out = false;
  std::array<char, 4096> buf{};
  while (open_streams > 0) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    const int ready = ::poll(fds.data(), fds.size(), static_cast<int>(remaining.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (fds[i].fd < 0 || fds[i].revents == 0) continue;
      const ssize_t n = ::read(fds[i].fd, buf.data(), buf.size());
      if (n > 0) {
        sinks[i]->append(buf.data(), static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        fds[i].fd = -1;
        --open_streams;
      }
    }
  }

  int status = 0;
  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::waitpid(pid, &status, 0);
    throw Error(Errc::TimeoutError, "planner exceeded " + std::to_string(timeout_seconds) + " s");
  }
  // Streams closed; the child may still be running briefly.
  while (true) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (w < 0 && errno != EINTR) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw Error(Errc::TimeoutError, "planner exceeded " + std::to_string(timeout_seconds) + " s");
    }
    ::usleep(2000);
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

}  // namespace

pddl::Plan invoke_planner(const PlannerPlugin& plugin, std::string_view domain_text,
                          std::string_view problem_text) {
  TempDir dir;
  const fs::path domain = dir.path() / "domain.pddl";
  const fs::path problem = dir.path() / "problem.pddl";
  const fs::path plan_out = dir.path() / "plan.txt";
  write_file(domain, domain_text);
  write_file(problem, problem_text);

  std::string command = plugin.command_template;
  command = substitute(command, "{domain}", shell_quote(domain.string()));
  command = substitute(command, "{problem}", shell_quote(problem.string()));
  command = substitute(command, "{plan_out}", shell_quote(plan_out.string()));

  const ProcessResult run = run_shell(command, plugin.timeout_seconds);
  if (run.exit_code == 126 || run.exit_code == 127) {
    throw Error(Errc::SpawnError, "planner '" + plugin.name + "' could not be started: " + run.err);
  }
  if (plugin.plan_source == PlanSource::Stdout) return extract_plan(run.out);

  std::ifstream in(plan_out, std::ios::binary);
  if (!in) throw Error(Errc::NoPlanInOutput, "planner '" + plugin.name + "' wrote no plan file");
  std::ostringstream text;
  text << in.rdbuf();
  return extract_plan(text.str());
}

}  // namespace pddlwb::planner
