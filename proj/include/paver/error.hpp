#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace paver {

/// Broad failure classes. They map one-to-one onto the CLI exit codes and the
/// C API status codes, so keep the numbering stable.
enum class ErrorKind {
  Usage = 2,
  Input = 3,
  Analysis = 4,
  Internal = 5,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Syntax or type error in a MiniLang source unit.
class ParseError : public Error {
public:
  ParseError(const std::string &file, int line, int column,
             const std::string &message)
      : Error(ErrorKind::Input, format(file, line, column, message)),
        line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  static std::string format(const std::string &file, int line, int column,
                            const std::string &message) {
    return file + ":" + std::to_string(line) + ":" + std::to_string(column) +
           ": " + message;
  }

  int line_;
  int column_;
};

[[noreturn]] inline void throw_input(const std::string &message) {
  throw Error(ErrorKind::Input, message);
}

[[noreturn]] inline void throw_analysis(const std::string &message) {
  throw Error(ErrorKind::Analysis, message);
}

/// Non-fatal findings accumulated by the analyses (degenerate paths,
/// unreachable vulnerabilities, infinite loops attached to the exit).
struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Warning;
  std::string code;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

inline void warn(Diagnostics *diags, std::string code, std::string message) {
  if (diags)
    diags->push_back({Diagnostic::Severity::Warning, std::move(code),
                      std::move(message)});
}

} // namespace paver
