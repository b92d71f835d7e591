#pragma once

#include <stdexcept>
#include <string>

namespace ultrareg {

// Error taxonomy. Exceptions are reserved for misuse and broken setups
// (bad parameters, incompatible grids, unresolvable geometry). Analysis
// verdicts (pass/fail/inconclusive) are ordinary return values and must
// never be signalled by throwing.
enum class ErrorKind {
  parameter,      // argument outside its documented domain
  domain,         // input data violates a precondition (NaN, empty net, ...)
  geometry,       // grid/window/ladder geometry cannot support the request
  compatibility,  // two objects with mismatched grids or ladders
  truncation,     // series/operator truncation bound cannot be certified
  resolution,     // requested scale below what the grid resolves
  schema,         // malformed scenario/config input
  io,             // file read/write failure
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::domain: return "domain";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::compatibility: return "compatibility";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::schema: return "schema";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ultrareg
