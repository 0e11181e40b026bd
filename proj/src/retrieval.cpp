#include "raf/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "raf/error.hpp"
#include "raf/kernels.hpp"
#include "raf/rng.hpp"

namespace raf {

std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed)
{
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) {
        perm[i] = i;
    }
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

namespace {

std::size_t fraction_count(double fraction, std::size_t n)
{
    // The epsilon keeps exact products such as 0.2 * 10 from rounding up.
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

} // namespace

DatasetSplit split_dataset(std::span<const TimeSeries> dataset, double test_fraction, std::uint64_t seed,
                           double validation_fraction)
{
    if (dataset.empty()) {
        throw Error(ErrorCode::EmptyDataset, "cannot split an empty dataset");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "test fraction must lie in (0, 1)");
    }
    if (!(validation_fraction >= 0.0 && test_fraction + validation_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "validation fraction must be >= 0 and leave room for a database");
    }
    const std::size_t n = dataset.size();
    const std::size_t n_test = fraction_count(test_fraction, n);
    const std::size_t n_val = std::min(fraction_count(validation_fraction, n), n - n_test);
    const auto perm = split_permutation(n, seed);

    // Membership comes from the permutation; each part keeps dataset order.
    std::vector<int> part(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        part[perm[k]] = k < n_test ? 2 : (k < n_test + n_val ? 1 : 0);
    }
    DatasetSplit split;
    for (std::size_t i = 0; i < n; ++i) {
        auto& dst = part[i] == 2 ? split.test : (part[i] == 1 ? split.validation : split.database);
        dst.push_back(dataset[i]);
    }
    return split;
}

WindowIndex::WindowIndex(std::size_t window_len, std::size_t future_len, std::size_t stride, std::size_t dim)
    : window_len_(window_len), future_len_(future_len), stride_(stride), dim_(dim)
{
    if (window_len == 0 || future_len == 0 || stride == 0 || dim == 0) {
        throw Error(ErrorCode::InvalidArgument, "window length, future length, stride and dim must be >= 1");
    }
}

std::span<const double> WindowIndex::raw_context(std::size_t i) const
{
    return {raw_.data() + i * (window_len_ + future_len_), window_len_};
}

std::span<const double> WindowIndex::raw_future(std::size_t i) const
{
    return {raw_.data() + i * (window_len_ + future_len_) + window_len_, future_len_};
}

std::size_t WindowIndex::add_series(std::string_view id)
{
    series_ids_.emplace_back(id);
    return series_ids_.size() - 1;
}

void WindowIndex::add_entry(std::size_t series, std::size_t offset, std::span<const double> embedding,
                            const NormStats& stats, std::span<const double> raw)
{
    if (series >= series_ids_.size()) {
        throw Error(ErrorCode::InvalidArgument, "entry refers to an unregistered series");
    }
    if (embedding.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "embedding has dimension " + std::to_string(embedding.size()) +
                                                      ", index expects " + std::to_string(dim_));
    }
    if (raw.size() != window_len_ + future_len_) {
        throw Error(ErrorCode::LengthMismatch, "raw window must hold context and future values");
    }
    entries_.push_back(IndexEntry{series, offset, stats});
    embeddings_.insert(embeddings_.end(), embedding.begin(), embedding.end());
    raw_.insert(raw_.end(), raw.begin(), raw.end());
}

bool operator==(const WindowIndex& a, const WindowIndex& b)
{
    if (a.window_len_ != b.window_len_ || a.future_len_ != b.future_len_ || a.stride_ != b.stride_ ||
        a.dim_ != b.dim_ || a.series_ids_ != b.series_ids_ || a.entries_.size() != b.entries_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        const auto& x = a.entries_[i];
        const auto& y = b.entries_[i];
        if (x.series != y.series || x.offset != y.offset || x.stats.mean != y.stats.mean ||
            x.stats.std != y.stats.std || x.stats.degenerate != y.stats.degenerate) {
            return false;
        }
    }
    return a.embeddings_ == b.embeddings_ && a.raw_ == b.raw_;
}

std::vector<double> query_embedding(std::span<const double> context, Embedder* embedder)
{
    auto normalized = instance_normalize(context);
    if (embedder == nullptr) {
        return std::move(normalized.values);
    }
    return embedder->embed(normalized.values);
}

WindowIndex build_index(std::span<const TimeSeries> database, std::size_t window_len, std::size_t future_len,
                        std::size_t stride, Embedder* embedder)
{
    if (window_len == 0 || future_len == 0 || stride == 0) {
        throw Error(ErrorCode::InvalidArgument, "window length, horizon and stride must be >= 1");
    }
    const std::size_t span_len = window_len + future_len;

    std::optional<WindowIndex> index;
    if (embedder == nullptr) {
        index.emplace(window_len, future_len, stride, window_len);
    }
    for (const auto& series : database) {
        std::size_t series_pos = SIZE_MAX;
        const std::span<const double> values(series.values);
        if (values.size() < span_len) {
            continue;
        }
        for (std::size_t offset = 0; offset + span_len <= values.size(); offset += stride) {
            const auto raw = values.subspan(offset, span_len);
            if (!all_finite(raw)) {
                continue;
            }
            auto normalized = instance_normalize(raw.first(window_len));
            std::vector<double> emb =
                embedder == nullptr ? std::move(normalized.values) : embedder->embed(normalized.values);
            if (!index) {
                index.emplace(window_len, future_len, stride, emb.size());
            }
            if (series_pos == SIZE_MAX) {
                series_pos = index->add_series(series.id);
            }
            index->add_entry(series_pos, offset, emb, normalized.stats, raw);
        }
    }
    if (!index || index->empty()) {
        throw Error(ErrorCode::NoValidWindows, "no series provides a complete window of length " +
                                                   std::to_string(window_len) + " plus horizon " +
                                                   std::to_string(future_len));
    }
    return std::move(*index);
}

std::vector<RetrievedMatch> top_n(std::span<const double> query, const WindowIndex& index, std::size_t n,
                                  ScanMode mode)
{
    if (index.empty()) {
        throw Error(ErrorCode::EmptyIndex, "cannot search an empty index");
    }
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "n must be positive");
    }
    if (query.size() != index.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "query has dimension " + std::to_string(query.size()) +
                                                      ", index expects " + std::to_string(index.dim()));
    }
    const auto hits = mode == ScanMode::Serial
                          ? kernels::top_n_serial(query, index.embeddings(), index.size(), n)
                          : kernels::top_n_parallel(query, index.embeddings(), index.size(), n);
    std::vector<RetrievedMatch> out;
    out.reserve(hits.size());
    for (const auto& h : hits) {
        const auto ctx = index.raw_context(h.entry);
        const auto fut = index.raw_future(h.entry);
        out.push_back(RetrievedMatch{index.series_id(h.entry), h.entry, index.entry(h.entry).offset, h.distance,
                                     std::vector<double>(ctx.begin(), ctx.end()),
                                     std::vector<double>(fut.begin(), fut.end())});
    }
    return out;
}

AlignedSeries align_and_concatenate(std::span<const double> retrieved, std::span<const double> original)
{
    if (retrieved.empty() || original.empty()) {
        throw Error(ErrorCode::EmptyInput, "alignment needs non-empty retrieved and original segments");
    }
    AlignedSeries out;
    out.offset = original.front() - retrieved.back();
    out.values.reserve(retrieved.size() + original.size());
    for (double v : retrieved) {
        out.values.push_back(v + out.offset);
    }
    // v + (first - v) can be off by an ulp; the boundary is pinned exactly.
    out.values.back() = original.front();
    out.values.insert(out.values.end(), original.begin(), original.end());
    return out;
}

RafQuery form_raf_query(std::span<const double> original_context, const RetrievedMatch& match)
{
    if (original_context.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "original context needs at least 2 values");
    }
    if (match.retrieved_context.empty() || match.retrieved_future.empty()) {
        throw Error(ErrorCode::InvalidArgument, "match carries no retrieved context or future");
    }
    std::vector<double> retrieved(match.retrieved_context);
    retrieved.insert(retrieved.end(), match.retrieved_future.begin(), match.retrieved_future.end());

    const auto norm_retrieved = instance_normalize(retrieved);
    const auto norm_original = instance_normalize(original_context);
    auto aligned = align_and_concatenate(norm_retrieved.values, norm_original.values);

    RafQuery q;
    q.augmented = std::move(aligned.values);
    q.boundary_offset = aligned.offset;
    q.orig_stats = norm_original.stats;
    q.retrieved_context_len = match.retrieved_context.size();
    q.horizon = match.retrieved_future.size();
    q.degenerate_context = norm_original.stats.degenerate;
    return q;
}

ForecastSamples project_forecast(const ForecastSamples& model_output, std::size_t horizon, const NormStats& stats)
{
    if (model_output.horizon() < horizon) {
        throw Error(ErrorCode::ShortSample, "model produced " + std::to_string(model_output.horizon()) +
                                                " steps, " + std::to_string(horizon) + " required");
    }
    ForecastSamples out(model_output.num_samples(), horizon);
    for (std::size_t s = 0; s < model_output.num_samples(); ++s) {
        for (std::size_t h = 0; h < horizon; ++h) {
            out.at(s, h) = model_output.at(s, h) * stats.std + stats.mean;
        }
    }
    return out;
}

} // namespace raf
