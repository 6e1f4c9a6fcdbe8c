#include "wove/atomic_file.hpp"

#include <unistd.h>

#include "wove/errors.hpp"

namespace wove {

AtomicFile::AtomicFile(std::filesystem::path path, bool binary)
    : path_(std::move(path)),
      temp_(path_.string() + ".tmp." + std::to_string(::getpid())) {
  auto mode = std::ios::out | std::ios::trunc;
  if (binary) mode |= std::ios::binary;
  out_.open(temp_, mode);
  if (!out_) throw DataError("cannot open " + temp_.string() + " for writing");
}

AtomicFile::~AtomicFile() {
  if (committed_) return;
  out_.close();
  std::error_code ec;
  std::filesystem::remove(temp_, ec);
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw DataError("write failed for " + path_.string());
  out_.close();
  std::error_code ec;
  std::filesystem::rename(temp_, path_, ec);
  if (ec) throw DataError("cannot rename " + temp_.string() + " to " + path_.string() + ": " + ec.message());
  committed_ = true;
}

}  // namespace wove
