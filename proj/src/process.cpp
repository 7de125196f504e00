#include "promptrl/process.hpp"

#include <csignal>
#include <cstring>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace promptrl {

LineProcess::LineProcess(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw std::invalid_argument("LineProcess: empty command");
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw std::runtime_error("LineProcess: pipe failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw std::runtime_error("LineProcess: pipe failed");
  }
  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);

  pid_ = fork();
  if (pid_ < 0) throw std::runtime_error("LineProcess: fork failed");
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  std::signal(SIGPIPE, SIG_IGN);
}

LineProcess::~LineProcess() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

std::string LineProcess::request(const std::string& line) {
  std::string msg = line;
  msg.push_back('\n');
  std::size_t sent = 0;
  while (sent < msg.size()) {
    const auto n = write(to_child_, msg.data() + sent, msg.size() - sent);
    if (n <= 0) throw std::runtime_error("external process '" + argv_[0] + "' closed its input");
    sent += static_cast<std::size_t>(n);
  }
  for (;;) {
    if (auto nl = pending_.find('\n'); nl != std::string::npos) {
      std::string out = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      return out;
    }
    char buf[4096];
    const auto n = read(from_child_, buf, sizeof(buf));
    if (n <= 0) throw std::runtime_error("external process '" + argv_[0] + "' exited without a response");
    pending_.append(buf, static_cast<std::size_t>(n));
  }
}

}  // namespace promptrl
