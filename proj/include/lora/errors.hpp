#pragma once

#include <stdexcept>
#include <string>

namespace lora {

// Scenario/partition file problems. `line` is 1-based; 0 when not tied to a line.
class parse_error : public std::runtime_error {
 public:
  parse_error(std::string file, int line, const std::string& what)
      : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) + ": " + what
                                    : file + ": " + what),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

// Violated operation precondition (unreachable SF, out-of-zone distance, ...).
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lora
