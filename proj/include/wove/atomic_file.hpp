#pragma once

#include <filesystem>
#include <fstream>

namespace wove {

/// Output file that only appears at its final path after commit(). Until
/// then data goes to a sibling temporary, which is removed if the object is
/// destroyed uncommitted.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path, bool binary = false);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return out_; }

  /// Flushes, checks the stream, and renames over the target. Throws
  /// DataError on failure.
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace wove
