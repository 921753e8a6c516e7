#include "nbs/command_oracle.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

namespace nbs {
namespace {

std::string substitute(const std::string& arg, std::int64_t coin) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = arg.find("{}", pos);
    if (hit == std::string::npos) {
      out.append(arg, pos, std::string::npos);
      return out;
    }
    out.append(arg, pos, hit - pos);
    out += std::to_string(coin);
    pos = hit + 2;
  }
}

}  // namespace

CommandOracle::CommandOracle(std::vector<std::string> argv_template,
                             Options options)
    : argv_template_(std::move(argv_template)), options_(std::move(options)) {
  if (argv_template_.empty())
    throw std::invalid_argument("CommandOracle: empty argument vector");
}

int CommandOracle::sample(std::int64_t coin) {
  std::vector<std::string> args;
  args.reserve(argv_template_.size());
  for (const auto& a : argv_template_) args.push_back(substitute(a, coin));
  std::vector<char*> argv;
  argv.reserve(args.size() + 1);
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  // exec failures in the child are reported through a CLOEXEC pipe.
  int err_pipe[2];
  if (pipe(err_pipe) != 0) throw CommandError("CommandOracle: pipe() failed");

  const pid_t pid = fork();
  if (pid < 0) {
    close(err_pipe[0]);
    close(err_pipe[1]);
    throw CommandError("CommandOracle: fork() failed");
  }
  if (pid == 0) {
    close(err_pipe[0]);
    fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);
    if (options_.working_directory &&
        chdir(options_.working_directory->c_str()) != 0) {
      const int e = errno;
      (void)!write(err_pipe[1], &e, sizeof(e));
      _exit(127);
    }
    execvp(argv[0], argv.data());
    const int e = errno;
    (void)!write(err_pipe[1], &e, sizeof(e));
    _exit(127);
  }

  close(err_pipe[1]);
  int child_errno = 0;
  const ssize_t got = read(err_pipe[0], &child_errno, sizeof(child_errno));
  close(err_pipe[0]);

  const auto deadline =
      options_.timeout_ms
          ? std::optional(std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(*options_.timeout_ms))
          : std::nullopt;
  int status = 0;
  while (true) {
    const pid_t r = waitpid(pid, &status, deadline ? WNOHANG : 0);
    if (r == pid) break;
    if (r < 0) throw CommandError("CommandOracle: waitpid() failed");
    if (deadline && std::chrono::steady_clock::now() >= *deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw CommandError("CommandOracle: command timed out");
    }
    std::this_thread::sleep_for(std::chrono::microseconds(200));
  }

  if (got == sizeof(child_errno))
    throw CommandError(std::string("CommandOracle: cannot run command: ") +
                       std::strerror(child_errno));
  if (!WIFEXITED(status))
    throw CommandError("CommandOracle: command terminated abnormally");
  return WEXITSTATUS(status) == 0 ? 1 : 0;
}

}  // namespace nbs
