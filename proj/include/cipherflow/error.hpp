#pragma once

#include <stdexcept>
#include <string>

namespace cipherflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the configured message / value domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated wire bytes.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Discrete log not found in the precomputed range.
class NotInTable : public Error {
 public:
  using Error::Error;
};

class PolicyError : public Error {
 public:
  using Error::Error;
};

// Wrong, mismatched or forbidden key material.
class KeyError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace cipherflow
