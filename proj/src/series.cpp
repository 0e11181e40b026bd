#include "raf/series.hpp"

#include <cmath>

#include "raf/error.hpp"

namespace raf {

bool all_finite(std::span<const double> values) noexcept
{
    for (double v : values) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

Normalized instance_normalize(std::span<const double> series)
{
    if (series.empty()) {
        throw Error(ErrorCode::EmptyInput, "cannot normalize an empty sequence");
    }
    if (!all_finite(series)) {
        throw Error(ErrorCode::NonFiniteInput, "normalization input contains a missing or non-finite value");
    }
    const auto n = static_cast<double>(series.size());
    double sum = 0.0;
    for (double v : series) {
        sum += v;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : series) {
        const double d = v - mean;
        ss += d * d;
    }
    const double std = std::sqrt(ss / n);

    Normalized out;
    out.values.resize(series.size());
    out.stats.mean = mean;
    if (std < kDegenerateStd) {
        out.stats.std = 1.0;
        out.stats.degenerate = true;
        return out;  // all zeros
    }
    out.stats.std = std;
    for (std::size_t i = 0; i < series.size(); ++i) {
        out.values[i] = (series[i] - mean) / std;
    }
    return out;
}

std::vector<double> denormalize(std::span<const double> values, const NormStats& stats)
{
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = values[i] * stats.std + stats.mean;
    }
    return out;
}

PatchSet extract_patches(std::span<const double> series, std::size_t window_len)
{
    if (window_len == 0) {
        throw Error(ErrorCode::InvalidArgument, "window length must be at least 1");
    }
    if (window_len > series.size()) {
        throw Error(ErrorCode::WindowTooLong, "window length " + std::to_string(window_len) +
                                                  " exceeds series length " + std::to_string(series.size()));
    }
    const std::size_t count = series.size() - window_len + 1;
    PatchSet set;
    set.patches.reserve(count);
    set.has_gap.reserve(count);

    // Running count of NaNs inside the current window.
    std::size_t gaps = 0;
    for (std::size_t i = 0; i < window_len; ++i) {
        gaps += std::isnan(series[i]) ? 1 : 0;
    }
    for (std::size_t k = 0; k < count; ++k) {
        if (k > 0) {
            gaps -= std::isnan(series[k - 1]) ? 1 : 0;
            gaps += std::isnan(series[k + window_len - 1]) ? 1 : 0;
        }
        auto window = series.subspan(k, window_len);
        set.patches.push_back(Patch{k, std::vector<double>(window.begin(), window.end())});
        set.has_gap.push_back(gaps > 0);
    }
    return set;
}

EmbeddedToken embed_patch(std::span<const double> patch)
{
    EmbeddedToken token;
    token.direction.assign(patch.size(), 0.0);
    double ss = 0.0;
    for (double v : patch) {
        ss += v * v;
    }
    const double norm = std::sqrt(ss);
    if (norm < kZeroNorm) {
        return token;
    }
    token.norm = norm;
    for (std::size_t i = 0; i < patch.size(); ++i) {
        token.direction[i] = patch[i] / norm;
    }
    return token;
}

std::vector<double> decode_embedding(const EmbeddedToken& token)
{
    std::vector<double> out(token.direction.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = token.direction[i] * token.norm;
    }
    return out;
}

} // namespace raf
