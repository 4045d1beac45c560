#pragma once

#include <stdexcept>
#include <string>

namespace wavegroup {

// Base of every error thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or vector lengths that do not fit together.
class dimension_error : public error {
 public:
  using error::error;
};

// A coefficient vector whose layout is inconsistent with its data.
class layout_error : public error {
 public:
  using error::error;
};

// Requested object exceeds the configured memory budget.
class capacity_error : public error {
 public:
  using error::error;
};

class kernel_size_error : public error {
 public:
  using error::error;
};

// Tree has fewer than two levels, so no parent-child edges exist.
class no_edges_error : public error {
 public:
  using error::error;
};

class scheme_error : public error {
 public:
  using error::error;
};

class index_error : public error {
 public:
  using error::error;
};

// A precondition of an operation was violated (e.g. overlapping groups
// handed to a prox that needs a partition).
class contract_error : public error {
 public:
  using error::error;
};

class divergence_error : public error {
 public:
  using error::error;
};

class parameter_error : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

}  // namespace wavegroup
