#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slicesim {

// Base for every error raised by the library. Callers that only want to
// distinguish configuration problems from runtime failures can catch
// ConfigError and Error respectively.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(long long node)
      : Error("unknown or non-server node " + std::to_string(node)), node_(node) {}
  long long node() const { return node_; }

 private:
  long long node_;
};

class DuplicateSlice : public Error {
 public:
  explicit DuplicateSlice(long long slice)
      : Error("slice " + std::to_string(slice) + " is already allocated") {}
};

class UnknownSlice : public Error {
 public:
  explicit UnknownSlice(long long slice)
      : Error("slice " + std::to_string(slice) + " is not allocated") {}
};

class InsufficientResources : public Error {
 public:
  enum class Where { Server, Link };

  InsufficientResources(Where where, long long id, const std::string& detail)
      : Error(std::string(where == Where::Server ? "server " : "link ") +
              std::to_string(id) + ": " + detail),
        where_(where),
        id_(id) {}

  Where where() const { return where_; }
  long long id() const { return id_; }

 private:
  Where where_;
  long long id_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got)
      : Error(what + ": expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class NoFeasibleAction : public Error {
 public:
  NoFeasibleAction() : Error("every action is masked") {}
};

class NonFiniteGradient : public Error {
 public:
  NonFiniteGradient() : Error("non-finite gradient; update skipped") {}
};

class NonMonotoneTime : public Error {
 public:
  NonMonotoneTime(double last, double got)
      : Error("time went backwards: " + std::to_string(got) + " < " +
              std::to_string(last)) {}
};

}  // namespace slicesim
