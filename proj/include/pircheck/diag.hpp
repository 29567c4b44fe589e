#ifndef PIRCHECK_DIAG_HPP
#define PIRCHECK_DIAG_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace pircheck {

struct SourcePos {
  int line = 0;
  int col = 0;
};

inline std::string pos_str(SourcePos p) {
  std::ostringstream os;
  os << p.line << ":" << p.col;
  return os.str();
}

// All user-facing input errors (syntax, resolution, width checks) carry a
// source position. Internal invariant breaks use plain logic_error.
class InputError : public std::runtime_error {
 public:
  InputError(std::string kind, SourcePos pos, const std::string& msg)
      : std::runtime_error(kind + " at " + pos_str(pos) + ": " + msg),
        kind_(std::move(kind)),
        pos_(pos) {}

  const std::string& kind() const { return kind_; }
  SourcePos pos() const { return pos_; }

 private:
  std::string kind_;
  SourcePos pos_;
};

class SyntaxError : public InputError {
 public:
  SyntaxError(SourcePos pos, const std::string& msg)
      : InputError("syntax error", pos, msg) {}
};

class ResolveError : public InputError {
 public:
  ResolveError(SourcePos pos, const std::string& msg)
      : InputError("resolution error", pos, msg) {}
};

class WidthError : public InputError {
 public:
  WidthError(SourcePos pos, const std::string& msg)
      : InputError("width error", pos, msg) {}
};

}  // namespace pircheck

#endif  // PIRCHECK_DIAG_HPP
