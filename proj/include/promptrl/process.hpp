#pragma once

#include <string>
#include <sys/types.h>
#include <vector>

namespace promptrl {

// A child process spoken to one line at a time over its stdin/stdout.
class LineProcess {
 public:
  // argv[0] is resolved through PATH. Throws std::runtime_error on spawn failure.
  explicit LineProcess(std::vector<std::string> argv);
  ~LineProcess();
  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  // Writes `line` plus a newline and returns the next response line without
  // its newline. Throws std::runtime_error if the child exits or closes stdout.
  std::string request(const std::string& line);

  const std::vector<std::string>& argv() const { return argv_; }

 private:
  std::vector<std::string> argv_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
};

}  // namespace promptrl
