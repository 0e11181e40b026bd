#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace raf {

// Missing observations are stored as quiet NaN.
struct TimeSeries {
    std::string id;
    std::string freq;
    std::vector<double> values;
};

struct NormStats {
    double mean = 0.0;
    double std = 1.0;         // population std; 1 when degenerate
    bool degenerate = false;  // raw std fell below kDegenerateStd
};

inline constexpr double kDegenerateStd = 1e-12;
inline constexpr double kZeroNorm = 1e-12;

struct Normalized {
    std::vector<double> values;
    NormStats stats;
};

/// Zero-mean, unit population-std rescaling of one instance.
/// A constant input yields all zeros with std = 1 and the degenerate flag.
Normalized instance_normalize(std::span<const double> series);

std::vector<double> denormalize(std::span<const double> values, const NormStats& stats);

struct Patch {
    std::size_t start = 0;
    std::vector<double> values;
};

struct PatchSet {
    std::vector<Patch> patches;  // every stride-1 window, in offset order
    std::vector<bool> has_gap;   // true where the window overlaps a missing value
};

PatchSet extract_patches(std::span<const double> series, std::size_t window_len);

/// [direction; norm] token. The zero patch maps to (zero direction, norm 0).
struct EmbeddedToken {
    std::vector<double> direction;
    double norm = 0.0;
};

EmbeddedToken embed_patch(std::span<const double> patch);
std::vector<double> decode_embedding(const EmbeddedToken& token);

bool all_finite(std::span<const double> values) noexcept;

} // namespace raf
