// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hyntp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An input violates a documented contract (symmetry, jump set membership, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The Laplacian spectrum cannot be brought to real (block) diagonal form.
class UnsupportedSpectrum : public Error {
 public:
  using Error::Error;
};

/// An explicit reset schedule ran out of values.
class ScheduleExhausted : public Error {
 public:
  using Error::Error;
};

/// The integrated state stopped being finite.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(double t, int j)
      : Error("non-finite state at (t=" + std::to_string(t) +
              ", j=" + std::to_string(j) + ")"),
        t_(t),
        j_(j) {}
  double t() const { return t_; }
  int j() const { return j_; }

 private:
  double t_;
  int j_;
};

/// A scenario file could not be parsed or failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyntp
