#pragma once

#include <stdexcept>
#include <string>

namespace domcert {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured size cap (vertices, edges, work, automorphism count) was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Two edge subsets (or a subset and a fold) refer to different host graphs.
class HostMismatch : public Error {
 public:
  using Error::Error;
};

class BadSignatureIndex : public Error {
 public:
  using Error::Error;
};

/// Breadth-first search visited more distinct states than allowed.
class StateCapExceeded : public Error {
 public:
  using Error::Error;
};

class HashMismatch : public Error {
 public:
  using Error::Error;
};

class BadParams : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// Malformed graph, graphon or certificate input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace domcert
