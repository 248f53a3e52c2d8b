#pragma once

#include <stdexcept>
#include <string>

namespace secbeam {

/// Base of every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input text could not be parsed (config files, pattern CSVs, geometry files).
class parse_error : public error {
public:
  parse_error(const std::string& what, int line = 0)
      : error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// A value is outside the domain of the requested operation.
class domain_error : public error {
public:
  using error::error;
};

/// Invalid parameters or grids.
class config_error : public domain_error {
public:
  using domain_error::domain_error;
};

/// The operation is not defined for the given geometry kind.
class unsupported_operation : public domain_error {
public:
  using domain_error::domain_error;
};

/// No admissible choice exists (empty mode set, uncovered distance, ...).
class infeasible_error : public domain_error {
public:
  using domain_error::domain_error;
};

}  // namespace secbeam
