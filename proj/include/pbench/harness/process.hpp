#pragma once

// Child processes with captured stdout/stderr (POSIX).

#include "pbench/error.hpp"

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace pbench {

struct ProcessResult {
  int exit_code = -1;   ///< valid when !signaled
  bool signaled = false;
  int signal = 0;
  bool not_found = false; ///< exec failed with ENOENT
  std::string out;
  std::string err;

  bool ok() const { return !signaled && !not_found && exit_code == 0; }
};

/// Run argv[0] (looked up on PATH) with extra environment entries and an
/// optional working directory, capturing both output streams.
inline ProcessResult run_process(const std::vector<std::string> &argv,
                                 const std::filesystem::path &cwd = {},
                                 const std::map<std::string, std::string> &env = {}) {
  if (argv.empty())
    throw Error(Errc::InvalidConfig, "empty command line");
  int out_pipe[2], err_pipe[2], exec_pipe[2];
  if (pipe(out_pipe) || pipe(err_pipe) || pipe(exec_pipe))
    throw Error(Errc::IoError, std::string("pipe: ") + std::strerror(errno));
  fcntl(exec_pipe[1], F_SETFD, FD_CLOEXEC);

  pid_t pid = fork();
  if (pid < 0)
    throw Error(Errc::IoError, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(err_pipe[0]);
    close(exec_pipe[0]);
    if (!cwd.empty() && chdir(cwd.c_str()) != 0)
      _exit(126);
    for (const auto &[k, v] : env)
      setenv(k.c_str(), v.c_str(), 1);
    std::vector<char *> args;
    for (const auto &a : argv)
      args.push_back(const_cast<char *>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    int e = errno;
    ssize_t w = write(exec_pipe[1], &e, sizeof e);
    (void)w;
    _exit(127);
  }
  close(out_pipe[1]);
  close(err_pipe[1]);
  close(exec_pipe[1]);

  ProcessResult r;
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string *sinks[2] = {&r.out, &r.err};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    if (poll(fds, 2, -1) < 0) {
      if (errno == EINTR)
        continue;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR)))
        continue;
      ssize_t n = read(fds[i].fd, buf, sizeof buf);
      if (n > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(n));
      } else {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  int exec_errno = 0;
  if (read(exec_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno)
    r.not_found = exec_errno == ENOENT || exec_errno == EACCES;
  close(exec_pipe[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFSIGNALED(status)) {
    r.signaled = true;
    r.signal = WTERMSIG(status);
  } else if (WIFEXITED(status)) {
    r.exit_code = WEXITSTATUS(status);
  }
  return r;
}

} // namespace pbench
