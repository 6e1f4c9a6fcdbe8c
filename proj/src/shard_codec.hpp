#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "wove/cooccur.hpp"

namespace wove::detail {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::array<unsigned char, sizeof(T)> swapped{};
    for (std::size_t k = 0; k < sizeof(T); ++k) swapped[k] = bytes[sizeof(T) - 1 - k];
    return std::bit_cast<T>(swapped);
  } else {
    return v;
  }
}

inline void put_record(std::ostream& out, const CoocEntry& e) {
  std::array<char, kShardRecordBytes> buf{};
  const std::uint32_t i = to_little(e.i);
  const std::uint32_t j = to_little(e.j);
  const std::uint64_t v = to_little(std::bit_cast<std::uint64_t>(e.value));
  std::memcpy(buf.data(), &i, 4);
  std::memcpy(buf.data() + 4, &j, 4);
  std::memcpy(buf.data() + 8, &v, 8);
  out.write(buf.data(), buf.size());
}

/// False at clean end of stream; throws DataError on a truncated record.
bool get_record(std::istream& in, CoocEntry& e);

}  // namespace wove::detail
