#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "fairnav/errors.hpp"
#include "fairnav/policy.hpp"

namespace fairnav {

namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

ExternalPolicy::ExternalPolicy(const std::string& command, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw ProtocolError("pipe() failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ProtocolError("pipe() failed");
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw ProtocolError("fork() failed");
  }
  if (pid_ == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid_, pid_);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ExternalPolicy::~ExternalPolicy() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ <= 0) return;
  // Give the child a moment to exit on EOF, then kill whatever is left of
  // its process group (the shell may have started other processes).
  bool exited = false;
  for (int i = 0; i < 50 && !exited; ++i) {
    exited = ::waitpid(pid_, nullptr, WNOHANG) == pid_;
    if (!exited) std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  ::kill(-pid_, SIGKILL);
  if (!exited) ::waitpid(pid_, nullptr, 0);
}

std::string ExternalPolicy::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw ProtocolError("external policy timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) throw ProtocolError("external policy timed out");
    char chunk[4096];
    const ssize_t got = ::read(from_child_, chunk, sizeof chunk);
    if (got < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("read failed: ") + std::strerror(errno));
    }
    if (got == 0) throw ProtocolError("external policy closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

std::vector<Action> ExternalPolicy::exchange(int step, std::span<const PolicyInput> inputs) {
  std::string msg = encode_request(step, inputs);
  msg.push_back('\n');
  std::size_t sent = 0;
  while (sent < msg.size()) {
    const ssize_t w = ::write(to_child_, msg.data() + sent, msg.size() - sent);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("external policy closed its input");
    }
    sent += static_cast<std::size_t>(w);
  }
  return decode_response(read_line(), inputs.size());
}

}  // namespace fairnav
