#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vulpath {

/// Base of every error raised by the toolchain. The CLI maps these to exit
/// code 1 (user error); anything else escaping is an internal error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& what)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class UnsupportedConstruct : public Error {
 public:
  UnsupportedConstruct(std::string construct, int line)
      : Error("unsupported construct '" + construct + "' at line " +
              std::to_string(line)),
        construct_(std::move(construct)),
        line_(line) {}
  const std::string& construct() const { return construct_; }
  int line() const { return line_; }

 private:
  std::string construct_;
  int line_;
};

class UnreachableExit : public Error {
 public:
  explicit UnreachableExit(std::vector<int> nodes)
      : Error(describe(nodes)), nodes_(std::move(nodes)) {}
  const std::vector<int>& nodes() const { return nodes_; }

 private:
  static std::string describe(const std::vector<int>& nodes) {
    std::string s = "exit unreachable from nodes:";
    for (int n : nodes) s += " " + std::to_string(n);
    return s;
  }
  std::vector<int> nodes_;
};

/// JSON document does not match the expected schema. `path()` is a JSON
/// path such as `$.edges[3].kind`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ManifestMissing : public Error {
 public:
  using Error::Error;
};
class ManifestMismatch : public Error {
 public:
  using Error::Error;
};
class LabelOutOfRange : public Error {
 public:
  using Error::Error;
};
class EmptyCorpus : public Error {
 public:
  using Error::Error;
};
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};
class EmptyGraph : public Error {
 public:
  using Error::Error;
};
class NoPositives : public Error {
 public:
  using Error::Error;
};
class SingleClass : public Error {
 public:
  using Error::Error;
};
class NotAStatement : public Error {
 public:
  using Error::Error;
};
class InvalidPath : public Error {
 public:
  using Error::Error;
};
class NoPaths : public Error {
 public:
  using Error::Error;
};
class EmptyGroundTruth : public Error {
 public:
  using Error::Error;
};
class EmptyTestSplit : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vulpath
