#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "raf/adapter.hpp"
#include "raf/bench.hpp"
#include "raf/config.hpp"
#include "raf/dataset.hpp"
#include "raf/error.hpp"
#include "raf/forecaster.hpp"
#include "raf/index_io.hpp"
#include "raf/retrieval.hpp"
#include "raf/rng.hpp"
#include "raf/synth.hpp"
#include "raf/tsr.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> stride;
    std::optional<std::string> adapter;
    std::string out;
    std::optional<int> threads;
};

std::string fmt6(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_list(std::span<const double> v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            s += ',';
        }
        s += fmt6(v[i]);
    }
    return s + "]";
}

raf::KeyValueConfig load_config(const std::string& path)
{
    if (path.empty()) {
        return {};
    }
    return raf::KeyValueConfig::load(path);
}

void apply_threads(const std::optional<int>& threads)
{
    if (threads && *threads > 0) {
        omp_set_num_threads(*threads);
    }
}

std::unique_ptr<raf::Forecaster> make_forecaster(const std::string& name, std::size_t season,
                                                 const std::optional<std::string>& adapter_flag)
{
    if (name == "adapter") {
        const auto cmd = raf::resolve_adapter_command(adapter_flag);
        if (!cmd) {
            throw raf::Error(raf::ErrorCode::InvalidArgument, "forecaster 'adapter' needs --adapter or RAF_ADAPTER");
        }
        return std::make_unique<raf::AdapterForecaster>(raf::AdapterOptions{*cmd});
    }
    return raf::make_builtin_forecaster(name, season);
}

const raf::TimeSeries& find_series(const std::vector<raf::TimeSeries>& data, const std::string& id)
{
    for (const auto& s : data) {
        if (s.id == id) {
            return s;
        }
    }
    throw raf::Error(raf::ErrorCode::InvalidArgument, "no series with id '" + id + "'");
}

// ---------------------------------------------------------------------------

struct IndexArgs {
    std::string data;
    std::size_t c = 0;
    std::size_t h = 0;
    std::string output;
    bool adapter_embeddings = false;
};

int run_index(const Common& common, const IndexArgs& a)
{
    const auto data = raf::load_dataset(a.data);
    std::unique_ptr<raf::AdapterForecaster> encoder;
    if (a.adapter_embeddings) {
        const auto cmd = raf::resolve_adapter_command(common.adapter);
        if (!cmd) {
            throw raf::Error(raf::ErrorCode::InvalidArgument, "--adapter-embeddings needs --adapter or RAF_ADAPTER");
        }
        encoder = std::make_unique<raf::AdapterForecaster>(raf::AdapterOptions{*cmd});
    }
    const auto index = raf::build_index(data, a.c, a.h, common.stride.value_or(1), encoder.get());
    raf::save_index(a.output, index);
    std::cout << "indexed " << index.size() << " windows from " << index.series_ids().size() << " series (dim "
              << index.dim() << ") -> " << a.output << '\n';
    return 0;
}

struct QueryArgs {
    std::string index;
    std::vector<double> context;
    std::string data;
    std::string series;
    std::size_t n = 5;
};

std::vector<double> query_context(const QueryArgs& a, std::size_t c)
{
    if (!a.context.empty()) {
        return a.context;
    }
    if (a.data.empty() || a.series.empty()) {
        throw raf::Error(raf::ErrorCode::InvalidArgument, "give --context or both --data and --series");
    }
    const auto data = raf::load_dataset(a.data);
    const auto& s = find_series(data, a.series);
    if (s.values.size() < c) {
        throw raf::Error(raf::ErrorCode::WindowTooLong, "series '" + a.series + "' is shorter than C");
    }
    const auto tail = c == 0 ? std::span<const double>(s.values) : std::span<const double>(s.values).last(c);
    return {tail.begin(), tail.end()};
}

int run_retrieve(const QueryArgs& a)
{
    const auto index = raf::load_index(a.index);
    const auto context = query_context(a, index.window_len());
    const auto matches = raf::top_n(raf::query_embedding(context), index, a.n, raf::ScanMode::Parallel);
    std::cout << "rank,series,offset,distance\n";
    for (std::size_t i = 0; i < matches.size(); ++i) {
        std::cout << i + 1 << ',' << matches[i].series_id << ',' << matches[i].offset << ','
                  << raf::format_real(matches[i].distance) << '\n';
    }
    return 0;
}

struct ForecastArgs {
    QueryArgs query;
    std::size_t h = 0;
    std::string method = "raf";
    std::string forecaster = "seasonal-naive";
    std::size_t season = 1;
    std::size_t num_samples = 20;
};

int run_forecast(const Common& common, const ForecastArgs& a)
{
    std::optional<raf::WindowIndex> index;
    std::vector<double> context;
    raf::Method method;
    if (a.method == "raf") {
        method = raf::Method::Raf;
        if (a.query.index.empty()) {
            throw raf::Error(raf::ErrorCode::InvalidArgument, "--method raf needs --index");
        }
        index = raf::load_index(a.query.index);
        context = query_context(a.query, index->window_len());
    } else if (a.method == "baseline") {
        method = raf::Method::Baseline;
        context = query_context(a.query, 0);
    } else {
        throw raf::Error(raf::ErrorCode::InvalidArgument, "--method must be raf or baseline");
    }
    const std::size_t h = index ? index->future_len() : a.h;
    if (h == 0) {
        throw raf::Error(raf::ErrorCode::InvalidArgument, "--h is required for the baseline method");
    }
    auto forecaster = make_forecaster(a.forecaster, a.season, common.adapter);
    const auto samples = raf::forecast_series(method, context, h, a.num_samples, *forecaster,
                                              index ? &*index : nullptr);
    const auto median = raf::point_forecast(samples);
    const auto q = raf::quantile_forecast(samples);
    std::cout << "median " << fmt_list(median) << '\n';
    for (std::size_t l = 0; l < q.levels.size(); ++l) {
        std::cout << "q" << fmt6(q.levels[l]) << ' ' << fmt_list(q.values[l]) << '\n';
    }
    return 0;
}

struct BenchArgs {
    std::vector<std::string> datasets;
};

int run_bench(const Common& common, const BenchArgs& a)
{
    auto cfg = raf::bench_config_from(load_config(common.config));
    if (!a.datasets.empty()) {
        cfg.datasets.assign(a.datasets.begin(), a.datasets.end());
    }
    if (common.seed) cfg.seed = *common.seed;
    if (common.stride) cfg.stride = *common.stride;
    if (common.adapter) cfg.adapter = *common.adapter;
    if (common.threads) cfg.threads = *common.threads;
    cfg.validate();
    const auto table = raf::run_benchmark(cfg);
    const auto report = raf::aggregate(table);
    const fs::path out = common.out.empty() ? fs::path("results") : fs::path(common.out);
    raf::write_bench_outputs(out, table, report);
    raf::write_summary(std::cout, table, report);
    return 0;
}

raf::SynthConfig synth_config_from(const raf::KeyValueConfig& cfg, std::vector<double>& grid, std::string& forecaster)
{
    static constexpr std::string_view kKnown[] = {"C",    "H",          "f1",           "f2",
                                                  "phi",  "sigma",      "seed",         "num_instances",
                                                  "num_model_samples", "rotation_mode", "snr_grid", "forecaster"};
    cfg.reject_unknown(kKnown);
    auto nonneg = [](long long v, const char* key) {
        if (v < 0) {
            throw raf::Error(raf::ErrorCode::InvalidArgument, std::string(key) + " must be non-negative");
        }
        return static_cast<std::size_t>(v);
    };
    raf::SynthConfig sc;
    if (auto v = cfg.integer("C")) sc.context_len = nonneg(*v, "C");
    if (auto v = cfg.integer("H")) sc.horizon = nonneg(*v, "H");
    if (auto v = cfg.real("f1")) sc.f1 = *v;
    if (auto v = cfg.real("f2")) sc.f2 = *v;
    if (auto v = cfg.real("phi")) sc.phase = *v;
    if (auto v = cfg.real("sigma")) sc.sigma = *v;
    if (auto v = cfg.integer("seed")) sc.seed = static_cast<std::uint64_t>(*v);
    if (auto v = cfg.integer("num_instances")) sc.num_instances = nonneg(*v, "num_instances");
    if (auto v = cfg.integer("num_model_samples")) sc.num_model_samples = nonneg(*v, "num_model_samples");
    if (auto v = cfg.string("rotation_mode")) {
        if (*v == "random") {
            sc.rotation = raf::RotationMode::RandomOrthonormal;
        } else if (*v == "identity") {
            sc.rotation = raf::RotationMode::Identity;
        } else {
            throw raf::Error(raf::ErrorCode::InvalidArgument, "rotation_mode must be random or identity");
        }
    }
    grid = cfg.reals("snr_grid").value_or(std::vector<double>{0.1, 1.0, 10.0, 100.0});
    forecaster = cfg.string("forecaster").value_or("retrieval-copy");
    return sc;
}

int run_synth(const Common& common)
{
    std::vector<double> grid;
    std::string name;
    auto sc = synth_config_from(load_config(common.config), grid, name);
    if (common.seed) sc.seed = *common.seed;
    sc.validate();
    auto forecaster = make_forecaster(name, 1, common.adapter);
    const bool parallel = !(common.threads && *common.threads == 1);
    const auto points = raf::snr_sweep(sc, *forecaster, grid, parallel);
    const fs::path out = common.out.empty() ? fs::path("results") : fs::path(common.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw raf::Error(raf::ErrorCode::IoError, "cannot create " + out.string() + ": " + ec.message());
    }
    const auto path = out / "snr_sweep.csv";
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw raf::Error(raf::ErrorCode::IoError, "cannot write " + path.string());
    }
    raf::write_sweep_csv(f, points);
    raf::write_sweep_csv(std::cout, points);
    return 0;
}

struct TsrArgs {
    std::vector<double> series;
    std::size_t c = 0;
    double scale = 1e4;
    std::size_t h = 0;
    std::size_t generate = 0;
};

// Uniform [-1, 1] values with the final window copied to a random earlier
// slot that ends before the final window's predecessor.
std::vector<double> planted_series(std::size_t length, std::size_t c, std::uint64_t seed)
{
    if (length < 2 * c + 1) {
        throw raf::Error(raf::ErrorCode::InvalidArgument, "--generate needs a length of at least 2*C+1");
    }
    raf::Rng rng(seed);
    std::vector<double> s(length);
    for (auto& v : s) {
        v = 2.0 * rng.uniform() - 1.0;
    }
    const std::size_t start = rng.below(length - 2 * c);
    std::copy(s.end() - static_cast<std::ptrdiff_t>(c), s.end(), s.begin() + static_cast<std::ptrdiff_t>(start));
    return s;
}

int run_tsr(const Common& common, const TsrArgs& a)
{
    auto series = a.series;
    if (a.generate > 0) {
        series = planted_series(a.generate, a.c, common.seed.value_or(42));
        std::cout << "series " << fmt_list(series) << '\n';
    } else if (series.empty()) {
        throw raf::Error(raf::ErrorCode::InvalidArgument, "give --series or --generate");
    }
    std::cout << fmt_list(raf::solve_tsr(series, a.c, a.scale, a.h)) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Retrieval-augmented forecasting toolkit"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print help and exit");

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Key-value config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Random seed");
        sub->add_option("--stride", common.stride, "Index stride")->check(CLI::PositiveNumber);
        sub->add_option("--adapter", common.adapter, "External forecaster command line");
        sub->add_option("--out", common.out, "Output directory");
        sub->add_option("--threads", common.threads, "Worker threads (1 = serial)")->check(CLI::NonNegativeNumber);
    };

    IndexArgs index_args;
    auto* index_cmd = app.add_subcommand("index", "Build and snapshot a window index");
    add_common(index_cmd);
    index_cmd->add_option("--data", index_args.data, "JSONL dataset")->required();
    index_cmd->add_option("--c", index_args.c, "Context length")->required();
    index_cmd->add_option("--h", index_args.h, "Horizon")->required();
    index_cmd->add_option("-o,--output", index_args.output, "Snapshot path")->required();
    index_cmd->add_flag("--adapter-embeddings", index_args.adapter_embeddings, "Embed with the adapter's encoder");

    auto add_query = [](CLI::App* sub, QueryArgs& q) {
        sub->add_option("--index", q.index, "Index snapshot");
        sub->add_option("--context", q.context, "Comma-separated context values")->delimiter(',');
        sub->add_option("--data", q.data, "JSONL dataset holding the query series");
        sub->add_option("--series", q.series, "Id of the query series (its tail is the context)");
    };

    QueryArgs retrieve_args;
    auto* retrieve_cmd = app.add_subcommand("retrieve", "Show the nearest indexed windows");
    add_common(retrieve_cmd);
    add_query(retrieve_cmd, retrieve_args);
    retrieve_cmd->get_option("--index")->required();
    retrieve_cmd->add_option("-n", retrieve_args.n, "Number of matches")->check(CLI::PositiveNumber);

    ForecastArgs forecast_args;
    auto* forecast_cmd = app.add_subcommand("forecast", "Forecast one context");
    add_common(forecast_cmd);
    add_query(forecast_cmd, forecast_args.query);
    forecast_cmd->add_option("--h", forecast_args.h, "Horizon (baseline; raf uses the index horizon)");
    forecast_cmd->add_option("--method", forecast_args.method, "raf or baseline");
    forecast_cmd->add_option("--forecaster", forecast_args.forecaster, "Built-in name or 'adapter'");
    forecast_cmd->add_option("--season", forecast_args.season, "Seasonal-naive period");
    forecast_cmd->add_option("--num-samples", forecast_args.num_samples)->check(CLI::PositiveNumber);

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark grid and aggregate");
    add_common(bench_cmd);
    bench_cmd->add_option("--dataset", bench_args.datasets, "Dataset path (repeatable; overrides the config)");

    auto* synth_cmd = app.add_subcommand("synth", "Run the synthetic SNR sweep");
    add_common(synth_cmd);

    TsrArgs tsr_args;
    auto* tsr_cmd = app.add_subcommand("tsr", "Solve retrieval with the two-layer attention construction");
    add_common(tsr_cmd);
    tsr_cmd->add_option("--series", tsr_args.series, "Comma-separated series")->delimiter(',');
    tsr_cmd->add_option("--c", tsr_args.c, "Window length")->required();
    tsr_cmd->add_option("--scale", tsr_args.scale, "Attention scale")->check(CLI::NonNegativeNumber);
    tsr_cmd->add_option("--h", tsr_args.h, "Output length (default C)");
    tsr_cmd->add_option("--generate", tsr_args.generate, "Generate a planted series of this length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        apply_threads(common.threads);
        if (*index_cmd) return run_index(common, index_args);
        if (*retrieve_cmd) return run_retrieve(retrieve_args);
        if (*forecast_cmd) return run_forecast(common, forecast_args);
        if (*bench_cmd) return run_bench(common, bench_args);
        if (*synth_cmd) return run_synth(common);
        if (*tsr_cmd) return run_tsr(common, tsr_args);
    } catch (const raf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_validation() ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
