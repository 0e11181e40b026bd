#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "raf/samples.hpp"
#include "raf/series.hpp"

namespace raf {

// ---------------------------------------------------------------------------
// Database formation

struct DatasetSplit {
    std::vector<TimeSeries> database;
    std::vector<TimeSeries> validation;  // empty unless a validation fraction is requested
    std::vector<TimeSeries> test;
};

/// Seeded Fisher-Yates permutation of the input order. The first
/// ceil(test_fraction * N) permuted series form the test set, the next
/// ceil(validation_fraction * N) the validation set, the rest the database.
DatasetSplit split_dataset(std::span<const TimeSeries> dataset, double test_fraction, std::uint64_t seed,
                           double validation_fraction = 0.0);

/// The permutation used by split_dataset (exposed for inspection).
std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Window index

/// Maps a normalized window to a search vector. Identity embedding when absent.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(std::span<const double> normalized_window) = 0;
};

struct IndexEntry {
    std::size_t series = 0;  // position in WindowIndex::series_ids()
    std::size_t offset = 0;
    NormStats stats;         // statistics of the raw context window
};

class WindowIndex {
public:
    WindowIndex(std::size_t window_len, std::size_t future_len, std::size_t stride, std::size_t dim);

    std::size_t window_len() const noexcept { return window_len_; }
    std::size_t future_len() const noexcept { return future_len_; }
    std::size_t stride() const noexcept { return stride_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const std::vector<std::string>& series_ids() const noexcept { return series_ids_; }
    const IndexEntry& entry(std::size_t i) const { return entries_[i]; }
    const std::string& series_id(std::size_t i) const { return series_ids_[entries_[i].series]; }

    std::span<const double> embedding(std::size_t i) const { return {embeddings_.data() + i * dim_, dim_}; }
    std::span<const double> embeddings() const noexcept { return embeddings_; }
    std::span<const double> raw_context(std::size_t i) const;
    std::span<const double> raw_future(std::size_t i) const;

    /// Registers a source series; entries refer to it by the returned position.
    std::size_t add_series(std::string_view id);

    /// `raw` holds the window followed by its future (window_len + future_len values).
    void add_entry(std::size_t series, std::size_t offset, std::span<const double> embedding, const NormStats& stats,
                   std::span<const double> raw);

    friend bool operator==(const WindowIndex& a, const WindowIndex& b);

private:
    std::size_t window_len_;
    std::size_t future_len_;
    std::size_t stride_;
    std::size_t dim_;
    std::vector<std::string> series_ids_;
    std::vector<IndexEntry> entries_;
    std::vector<double> embeddings_;
    std::vector<double> raw_;
};

/// Indexes every window at offsets 0, stride, 2*stride, ... whose context and
/// future are free of missing values and fit inside the series.
WindowIndex build_index(std::span<const TimeSeries> database, std::size_t window_len, std::size_t future_len,
                        std::size_t stride, Embedder* embedder = nullptr);

/// Search vector for a raw context: instance-normalized, then embedded.
std::vector<double> query_embedding(std::span<const double> context, Embedder* embedder = nullptr);

struct RetrievedMatch {
    std::string series_id;
    std::size_t entry = 0;
    std::size_t offset = 0;
    double distance = 0.0;
    std::vector<double> retrieved_context;  // raw values
    std::vector<double> retrieved_future;   // raw values
};

enum class ScanMode { Serial, Parallel };

/// The n nearest entries by L2 distance, ascending, ties by entry order.
/// n larger than the index returns every entry.
std::vector<RetrievedMatch> top_n(std::span<const double> query, const WindowIndex& index, std::size_t n,
                                  ScanMode mode = ScanMode::Serial);

// ---------------------------------------------------------------------------
// Query formation

struct RafQuery {
    std::vector<double> augmented;  // [retrieved context, retrieved future, original context]
    NormStats orig_stats;
    double boundary_offset = 0.0;
    std::size_t retrieved_context_len = 0;
    std::size_t horizon = 0;
    bool degenerate_context = false;

    std::span<const double> retrieved_future() const
    {
        return std::span<const double>(augmented).subspan(retrieved_context_len, horizon);
    }
    std::span<const double> original_context() const
    {
        return std::span<const double>(augmented).subspan(retrieved_context_len + horizon);
    }
};

struct AlignedSeries {
    std::vector<double> values;
    double offset = 0.0;
};

/// Shifts `retrieved` so its last value equals original.front(), then appends `original`.
AlignedSeries align_and_concatenate(std::span<const double> retrieved, std::span<const double> original);

RafQuery form_raf_query(std::span<const double> original_context, const RetrievedMatch& match);

/// First `horizon` steps of every sample, mapped back to original units.
ForecastSamples project_forecast(const ForecastSamples& model_output, std::size_t horizon, const NormStats& stats);

} // namespace raf
