#pragma once

#include <stdexcept>
#include <string>

namespace recmle {

/// Base class for every error raised by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An evaluation point lies outside the (open) support of a family member.
class domain_error : public error {
 public:
  using error::error;
};

/// A parameter value lies outside the member's theta domain.
class parameter_error : public error {
 public:
  using error::error;
};

/// Structurally invalid input: empty samples, zero counts, undersized data.
class argument_error : public error {
 public:
  using error::error;
};

/// Inverting B (or a numeric inverse) failed: the target is outside the range.
class inversion_error : public error {
 public:
  using error::error;
};

/// A requested gamma moment does not exist (order at or past the pole).
class moment_error : public error {
 public:
  using error::error;
};

/// A series has no finite terms for the requested order.
class series_error : public error {
 public:
  using error::error;
};

/// An improper integral was detected to diverge.
class divergence_error : public error {
 public:
  using error::error;
};

/// A Monte Carlo run exceeded its per-replication failure budget.
class run_error : public error {
 public:
  using error::error;
};

/// File or format problems in readers/writers.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace recmle
