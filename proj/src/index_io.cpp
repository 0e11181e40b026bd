#include "raf/index_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "raf/error.hpp"

namespace raf {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'A', 'F', 'I', 'D', 'X', '\0', '\1'};

template <typename T>
void put_le(std::ostream& out, T value)
{
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    }
    out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename T>
T get_le(std::istream& in)
{
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) {
        throw Error(ErrorCode::ParseError, "index snapshot is truncated");
    }
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<T>(bytes[i]) << (8 * i);
    }
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

} // namespace

void write_index(std::ostream& out, const WindowIndex& index)
{
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kIndexSnapshotVersion);
    put_le<std::uint64_t>(out, index.window_len());
    put_le<std::uint64_t>(out, index.future_len());
    put_le<std::uint64_t>(out, index.stride());
    put_le<std::uint64_t>(out, index.dim());
    put_le<std::uint64_t>(out, index.series_ids().size());
    put_le<std::uint64_t>(out, index.size());
    for (const auto& id : index.series_ids()) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto& e = index.entry(i);
        put_le<std::uint64_t>(out, e.series);
        put_le<std::uint64_t>(out, e.offset);
        put_f64(out, e.stats.mean);
        put_f64(out, e.stats.std);
        put_le<std::uint8_t>(out, e.stats.degenerate ? 1 : 0);
        for (double v : index.embedding(i)) {
            put_f64(out, v);
        }
        for (double v : index.raw_context(i)) {
            put_f64(out, v);
        }
        for (double v : index.raw_future(i)) {
            put_f64(out, v);
        }
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing index snapshot");
    }
}

WindowIndex read_index(std::istream& in)
{
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw Error(ErrorCode::ParseError, "not an index snapshot (bad magic)");
    }
    const auto version = get_le<std::uint32_t>(in);
    if (version != kIndexSnapshotVersion) {
        throw Error(ErrorCode::ParseError, "unsupported index snapshot version " + std::to_string(version));
    }
    const auto window_len = get_le<std::uint64_t>(in);
    const auto future_len = get_le<std::uint64_t>(in);
    const auto stride = get_le<std::uint64_t>(in);
    const auto dim = get_le<std::uint64_t>(in);
    const auto series_count = get_le<std::uint64_t>(in);
    const auto entry_count = get_le<std::uint64_t>(in);

    WindowIndex index(window_len, future_len, stride, dim);
    for (std::uint64_t s = 0; s < series_count; ++s) {
        const auto len = get_le<std::uint32_t>(in);
        std::string id(len, '\0');
        in.read(id.data(), len);
        if (!in) {
            throw Error(ErrorCode::ParseError, "index snapshot is truncated");
        }
        index.add_series(id);
    }
    std::vector<double> embedding(dim);
    std::vector<double> raw(window_len + future_len);
    for (std::uint64_t i = 0; i < entry_count; ++i) {
        const auto series = get_le<std::uint64_t>(in);
        const auto offset = get_le<std::uint64_t>(in);
        NormStats stats;
        stats.mean = get_f64(in);
        stats.std = get_f64(in);
        stats.degenerate = get_le<std::uint8_t>(in) != 0;
        for (auto& v : embedding) {
            v = get_f64(in);
        }
        for (auto& v : raw) {
            v = get_f64(in);
        }
        index.add_entry(series, offset, embedding, stats, raw);
    }
    return index;
}

void save_index(const std::filesystem::path& path, const WindowIndex& index)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    write_index(out, index);
}

WindowIndex load_index(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_index(in);
}

} // namespace raf
