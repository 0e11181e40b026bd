#pragma once

#include <filesystem>
#include <iosfwd>

#include "raf/retrieval.hpp"

namespace raf {

// Index snapshot, version 1. All integers are unsigned little-endian, all reals
// are IEEE-754 binary64 bit patterns stored little-endian:
//
//   magic "RAFIDX\0\1" (8 bytes)
//   u32 version (=1)
//   u64 window_len, future_len, stride, dim, series_count, entry_count
//   series_count x { u32 byte length, UTF-8 id bytes }
//   entry_count  x { u64 series, u64 offset, f64 mean, f64 std, u8 degenerate,
//                    dim x f64 embedding, (window_len + future_len) x f64 raw }
inline constexpr std::uint32_t kIndexSnapshotVersion = 1;

void write_index(std::ostream& out, const WindowIndex& index);
WindowIndex read_index(std::istream& in);

void save_index(const std::filesystem::path& path, const WindowIndex& index);
WindowIndex load_index(const std::filesystem::path& path);

} // namespace raf
