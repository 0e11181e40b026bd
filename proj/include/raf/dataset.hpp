#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "raf/series.hpp"

namespace raf {

/// JSON Lines, one record per line: {"id":"...","freq":"...","values":[1.0, null, ...]}.
/// null becomes a missing value (NaN); blank lines are ignored; file order is kept.
std::vector<TimeSeries> read_dataset(std::istream& in, const std::string& source = "<stream>");
std::vector<TimeSeries> load_dataset(const std::filesystem::path& path);

/// Inverse of read_dataset; NaN is written as null.
void write_dataset(std::ostream& out, std::span<const TimeSeries> series);
void save_dataset(const std::filesystem::path& path, std::span<const TimeSeries> series);

} // namespace raf
