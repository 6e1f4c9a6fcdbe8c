#pragma once

#include <stdexcept>
#include <string>

namespace wove {

/// Bad or missing input data (unreadable file, malformed record, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid flag value or flag combination.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wove
