// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <stdexcept>
#include <string>

namespace epikick {

/// Base class for every error raised by the library. The CLI catches this
/// type, prints `what()` on a single line and exits nonzero.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value showed up where a finite one is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a schema or a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// API misuse: empty inputs, out-of-range arguments, stale caches.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A SIR step left the unit interval.
class StabilityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace epikick
