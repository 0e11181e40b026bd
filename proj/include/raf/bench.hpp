#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "raf/config.hpp"
#include "raf/forecaster.hpp"
#include "raf/metrics.hpp"
#include "raf/retrieval.hpp"
#include "raf/series.hpp"

namespace raf {

struct BenchConfig {
    std::vector<std::filesystem::path> datasets;
    std::string benchmark = "default";
    std::vector<std::size_t> context_lengths = {50, 75, 100, 150};
    std::vector<std::size_t> horizons = {10, 15, 20};
    double test_fraction = 0.2;
    double validation_fraction = 0.0;
    std::uint64_t seed = 42;
    std::size_t stride = 1;
    std::size_t num_samples = 20;
    std::string forecaster = "seasonal-naive";  // built-in name or "adapter"
    std::size_t seasonal_period = 1;            // for the seasonal-naive built-in
    std::optional<std::string> adapter;         // command line; RAF_ADAPTER when unset
    std::chrono::milliseconds adapter_timeout{120'000};
    bool adapter_embeddings = false;            // index with the adapter's encoder when it offers one
    std::vector<Method> methods = {Method::Baseline, Method::Raf};
    SeasonalityMap seasonality;
    int threads = 0;                            // 0 = OpenMP default, 1 = serial

    void validate() const;
};

/// Keys mirror the field names; seasonality overrides use "seasonality.<freq>".
BenchConfig bench_config_from(const KeyValueConfig& cfg);

struct NamedDataset {
    std::string name;
    std::vector<TimeSeries> series;
};

/// Series-level bookkeeping per (dataset, C, H): the four counts sum to the dataset size.
struct CellCounts {
    std::string dataset;
    std::size_t context_len = 0;
    std::size_t horizon = 0;
    std::size_t database = 0;
    std::size_t validation = 0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

struct ResultsTable {
    std::vector<EvalRecord> records;  // dataset, C, H, method order
    std::vector<CellCounts> counts;
    std::map<std::string, std::string> benchmark_of;  // dataset -> benchmark label
    std::vector<std::string> notes;
};

using ForecasterFactory = std::function<std::unique_ptr<Forecaster>()>;

/// Builds the factory named by config.forecaster.
ForecasterFactory make_forecaster_factory(const BenchConfig& config);

/// Forecast in original units for one context. Baseline: normalize, forecast,
/// de-normalize. Raf: retrieve the top-1 window, form the aligned query,
/// forecast, project with the original context's statistics.
ForecastSamples forecast_series(Method method, std::span<const double> context, std::size_t horizon,
                                std::size_t num_samples, Forecaster& forecaster, const WindowIndex* index,
                                Embedder* embedder = nullptr);

ResultsTable run_benchmark(const BenchConfig& config, std::span<const NamedDataset> datasets,
                           const ForecasterFactory& factory);

/// Loads every configured dataset (name = file stem) and runs with the configured forecaster.
ResultsTable run_benchmark(const BenchConfig& config);

std::vector<NamedDataset> load_datasets(const BenchConfig& config);

struct AggregateRow {
    std::string level;      // mean | relative | dataset | benchmark | overall
    std::string benchmark;
    std::string dataset;
    std::string method;     // mean rows only
    std::optional<std::size_t> context_len;
    std::string metric;     // wql | mase
    double value = 0.0;
};

struct AggregateReport {
    std::vector<AggregateRow> rows;
    std::vector<std::string> notes;

    std::optional<double> find(const std::string& level, const std::string& metric, const std::string& dataset = "",
                               std::optional<std::size_t> context_len = std::nullopt,
                               const std::string& method = "", const std::string& benchmark = "") const;
};

/// Means over horizons, raf/baseline ratios per (dataset, C), then geometric
/// means over C, over datasets per benchmark, and over benchmarks.
AggregateReport aggregate(const ResultsTable& table);

void write_cells_csv(std::ostream& out, const ResultsTable& table);
void write_failures_csv(std::ostream& out, const ResultsTable& table);
void write_counts_csv(std::ostream& out, const ResultsTable& table);
void write_aggregate_csv(std::ostream& out, const AggregateReport& report);
void write_summary(std::ostream& out, const ResultsTable& table, const AggregateReport& report);

/// cells.csv, failures.csv, counts.csv, aggregate.csv, summary.txt under `dir`.
void write_bench_outputs(const std::filesystem::path& dir, const ResultsTable& table, const AggregateReport& report);

} // namespace raf
