#include "raf/bench.hpp"

#include <algorithm>
#include <set>

#include <omp.h>

#include "raf/adapter.hpp"
#include "raf/dataset.hpp"
#include "raf/error.hpp"

namespace raf {

void BenchConfig::validate() const
{
    if (context_lengths.empty() || horizons.empty()) {
        throw Error(ErrorCode::InvalidArgument, "context_lengths and horizons must be non-empty");
    }
    for (auto c : context_lengths) {
        if (c < 2) {
            throw Error(ErrorCode::InvalidArgument, "every context length must be at least 2");
        }
    }
    for (auto h : horizons) {
        if (h == 0) {
            throw Error(ErrorCode::InvalidArgument, "every horizon must be at least 1");
        }
    }
    if (stride == 0 || num_samples == 0) {
        throw Error(ErrorCode::InvalidArgument, "stride and num_samples must be at least 1");
    }
    if (methods.empty() || std::set<Method>(methods.begin(), methods.end()).size() != methods.size()) {
        throw Error(ErrorCode::InvalidArgument, "methods must be a non-empty list without repeats");
    }
    if (threads < 0) {
        throw Error(ErrorCode::InvalidArgument, "threads must be >= 0");
    }
}

namespace {

std::size_t positive(long long v, const char* key)
{
    if (v < 0) {
        throw Error(ErrorCode::InvalidArgument, std::string("config key '") + key + "' must be non-negative");
    }
    return static_cast<std::size_t>(v);
}

std::vector<std::size_t> positive_list(const std::vector<long long>& v, const char* key)
{
    std::vector<std::size_t> out;
    for (auto x : v) {
        out.push_back(positive(x, key));
    }
    return out;
}

} // namespace

BenchConfig bench_config_from(const KeyValueConfig& cfg)
{
    static constexpr std::string_view kKnown[] = {
        "datasets",       "benchmark",       "context_lengths",    "horizons",           "test_fraction",
        "validation_fraction", "seed",       "stride",             "num_samples",        "forecaster",
        "seasonal_period", "adapter",        "adapter_timeout_s",  "adapter_embeddings", "methods",
        "threads",        "seasonality.",
    };
    cfg.reject_unknown(kKnown);

    BenchConfig bc;
    if (auto v = cfg.strings("datasets")) {
        bc.datasets.assign(v->begin(), v->end());
    }
    if (auto v = cfg.string("benchmark")) bc.benchmark = *v;
    if (auto v = cfg.integers("context_lengths")) bc.context_lengths = positive_list(*v, "context_lengths");
    if (auto v = cfg.integers("horizons")) bc.horizons = positive_list(*v, "horizons");
    if (auto v = cfg.real("test_fraction")) bc.test_fraction = *v;
    if (auto v = cfg.real("validation_fraction")) bc.validation_fraction = *v;
    if (auto v = cfg.integer("seed")) bc.seed = static_cast<std::uint64_t>(*v);
    if (auto v = cfg.integer("stride")) bc.stride = positive(*v, "stride");
    if (auto v = cfg.integer("num_samples")) bc.num_samples = positive(*v, "num_samples");
    if (auto v = cfg.string("forecaster")) bc.forecaster = *v;
    if (auto v = cfg.integer("seasonal_period")) bc.seasonal_period = positive(*v, "seasonal_period");
    if (auto v = cfg.string("adapter")) bc.adapter = *v;
    if (auto v = cfg.real("adapter_timeout_s")) {
        if (!(*v > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "adapter_timeout_s must be positive");
        }
        bc.adapter_timeout = std::chrono::milliseconds(static_cast<long long>(*v * 1000.0));
    }
    if (auto v = cfg.boolean("adapter_embeddings")) bc.adapter_embeddings = *v;
    if (auto v = cfg.strings("methods")) {
        bc.methods.clear();
        for (const auto& m : *v) {
            if (m == "raf") {
                bc.methods.push_back(Method::Raf);
            } else if (m == "baseline") {
                bc.methods.push_back(Method::Baseline);
            } else {
                throw Error(ErrorCode::InvalidArgument, "unknown method '" + m + "' (expected raf or baseline)");
            }
        }
    }
    if (auto v = cfg.integer("threads")) bc.threads = static_cast<int>(*v);
    for (const auto& key : cfg.keys()) {
        if (key.rfind("seasonality.", 0) == 0) {
            bc.seasonality.set(key.substr(12), positive(*cfg.integer(key), key.c_str()));
        }
    }
    return bc;
}

ForecasterFactory make_forecaster_factory(const BenchConfig& config)
{
    if (config.forecaster == "adapter") {
        const auto cmd = resolve_adapter_command(config.adapter);
        if (!cmd) {
            throw Error(ErrorCode::InvalidArgument, "forecaster 'adapter' needs --adapter or RAF_ADAPTER");
        }
        AdapterOptions opts{*cmd, config.adapter_timeout};
        return [opts]() -> std::unique_ptr<Forecaster> { return std::make_unique<AdapterForecaster>(opts); };
    }
    // Fail fast on unknown names.
    make_builtin_forecaster(config.forecaster, config.seasonal_period);
    const auto name = config.forecaster;
    const auto season = config.seasonal_period;
    return [name, season]() { return make_builtin_forecaster(name, season); };
}

ForecastSamples forecast_series(Method method, std::span<const double> context, std::size_t horizon,
                                std::size_t num_samples, Forecaster& forecaster, const WindowIndex* index,
                                Embedder* embedder)
{
    ForecastRequest req;
    req.horizon = horizon;
    req.num_samples = num_samples;
    if (method == Method::Baseline) {
        auto norm = instance_normalize(context);
        req.context = std::move(norm.values);
        return project_forecast(forecaster.forecast(req), horizon, norm.stats);
    }
    if (index == nullptr) {
        throw Error(ErrorCode::EmptyIndex, "retrieval-augmented forecasting needs an index");
    }
    if (index->future_len() != horizon) {
        throw Error(ErrorCode::InvalidArgument, "index future length " + std::to_string(index->future_len()) +
                                                    " differs from horizon " + std::to_string(horizon));
    }
    const auto query = query_embedding(context, embedder);
    const auto matches = top_n(query, *index, 1);
    const auto rq = form_raf_query(context, matches.front());
    req.context = rq.augmented;
    // Designated future in the original context's normalized units, so a
    // copy projects back onto the retrieved values.
    std::vector<double> fut(matches.front().retrieved_future);
    for (auto& v : fut) {
        v = (v - rq.orig_stats.mean) / rq.orig_stats.std;
    }
    req.designated_future = std::move(fut);
    return project_forecast(forecaster.forecast(req), horizon, rq.orig_stats);
}

namespace {

struct Combo {
    std::size_t context_len;
    std::size_t horizon;
    std::optional<WindowIndex> index;
    std::string index_error;
    std::vector<std::size_t> eligible;  // positions in split.test
};

struct Outcome {
    bool ok = false;
    std::string error;
    QuantileForecast quantiles;
    std::vector<double> point;
};

struct Task {
    std::size_t combo;
    std::size_t series;  // position in split.test
};

bool tail_usable(const TimeSeries& ts, std::size_t c, std::size_t h)
{
    if (ts.values.size() < c + h) {
        return false;
    }
    return all_finite(std::span<const double>(ts.values).last(c + h));
}

} // namespace

ResultsTable run_benchmark(const BenchConfig& config, std::span<const NamedDataset> datasets,
                           const ForecasterFactory& factory)
{
    config.validate();
    ResultsTable table;
    const int nthreads = config.threads > 0 ? config.threads : omp_get_max_threads();
    const bool want_raf = std::find(config.methods.begin(), config.methods.end(), Method::Raf) != config.methods.end();

    // Adapter embeddings are probed once; without the capability retrieval stays on identity embeddings.
    std::unique_ptr<Forecaster> index_forecaster;
    Embedder* index_embedder = nullptr;
    bool worker_embeddings = false;
    if (config.adapter_embeddings && want_raf) {
        index_forecaster = factory();
        auto* adapter = dynamic_cast<AdapterForecaster*>(index_forecaster.get());
        if (adapter != nullptr && adapter->can_embed()) {
            index_embedder = adapter;
            worker_embeddings = true;
        } else {
            table.notes.push_back("forecaster offers no embed capability; using identity embeddings");
        }
    }

    std::size_t failed_cells[2] = {0, 0};
    std::size_t total_cells[2] = {0, 0};
    std::string first_failure[2];

    for (const auto& ds : datasets) {
        table.benchmark_of[ds.name] = config.benchmark;
        const auto split = split_dataset(ds.series, config.test_fraction, config.seed, config.validation_fraction);

        std::vector<Combo> combos;
        for (auto c : config.context_lengths) {
            for (auto h : config.horizons) {
                Combo combo{c, h, std::nullopt, {}, {}};
                if (want_raf) {
                    try {
                        combo.index = build_index(split.database, c, h, config.stride, index_embedder);
                    } catch (const Error& e) {
                        combo.index_error = e.what();
                    }
                }
                for (std::size_t s = 0; s < split.test.size(); ++s) {
                    if (tail_usable(split.test[s], c, h)) {
                        combo.eligible.push_back(s);
                    }
                }
                combos.push_back(std::move(combo));
            }
        }

        std::vector<Task> tasks;
        for (std::size_t k = 0; k < combos.size(); ++k) {
            for (auto s : combos[k].eligible) {
                tasks.push_back({k, s});
            }
        }
        const std::size_t n_methods = config.methods.size();
        std::vector<Outcome> outcomes(tasks.size() * n_methods);

#pragma omp parallel num_threads(nthreads)
        {
            std::unique_ptr<Forecaster> forecaster;
            std::string setup_error;
            try {
                forecaster = factory();
            } catch (const std::exception& e) {
                setup_error = e.what();
            }
            Embedder* embedder = worker_embeddings ? dynamic_cast<Embedder*>(forecaster.get()) : nullptr;

#pragma omp for schedule(dynamic)
            for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tasks.size()); ++t) {
                const auto& task = tasks[static_cast<std::size_t>(t)];
                const auto& combo = combos[task.combo];
                const auto& ts = split.test[task.series];
                const auto window = std::span<const double>(ts.values).last(combo.context_len + combo.horizon);
                const auto context = window.first(combo.context_len);
                for (std::size_t m = 0; m < n_methods; ++m) {
                    auto& out = outcomes[static_cast<std::size_t>(t) * n_methods + m];
                    const Method method = config.methods[m];
                    if (!setup_error.empty()) {
                        out.error = setup_error;
                        continue;
                    }
                    if (method == Method::Raf && !combo.index) {
                        out.error = combo.index_error;
                        continue;
                    }
                    try {
                        const auto samples = forecast_series(method, context, combo.horizon, config.num_samples,
                                                             *forecaster, combo.index ? &*combo.index : nullptr,
                                                             embedder);
                        out.quantiles = quantile_forecast(samples);
                        out.point = point_forecast(samples);
                        out.ok = true;
                    } catch (const std::exception& e) {
                        out.error = e.what();
                    }
                }
            }
        }

        // Merge in canonical order.
        std::size_t task_pos = 0;
        for (const auto& combo : combos) {
            table.counts.push_back(CellCounts{ds.name, combo.context_len, combo.horizon, split.database.size(),
                                              split.validation.size(), combo.eligible.size(),
                                              split.test.size() - combo.eligible.size()});
            for (std::size_t m = 0; m < n_methods; ++m) {
                EvalRecord rec;
                rec.dataset = ds.name;
                rec.method = config.methods[m];
                rec.context_len = combo.context_len;
                rec.horizon = combo.horizon;
                rec.evaluated = combo.eligible.size();

                std::vector<std::vector<double>> actuals;
                std::vector<QuantileForecast> qfs;
                std::vector<double> mases;
                for (std::size_t e = 0; e < combo.eligible.size() && !rec.failed; ++e) {
                    const auto& out = outcomes[(task_pos + e) * n_methods + m];
                    const auto& ts = split.test[combo.eligible[e]];
                    if (!out.ok) {
                        rec.failed = true;
                        rec.failure = "series " + ts.id + ": " + out.error;
                        break;
                    }
                    const std::span<const double> values(ts.values);
                    const auto actual = values.last(combo.horizon);
                    const auto history = values.first(values.size() - combo.horizon);
                    actuals.emplace_back(actual.begin(), actual.end());
                    qfs.push_back(out.quantiles);
                    if (auto v = try_mase(actual, out.point, history, config.seasonality.period(ts.freq))) {
                        mases.push_back(*v);
                    } else {
                        ++rec.excluded_mase_count;
                    }
                }
                if (!rec.failed && combo.eligible.empty()) {
                    rec.failed = true;
                    rec.failure = "no test series long enough for C+H";
                }
                if (!rec.failed) {
                    try {
                        rec.wql = wql(actuals, qfs);
                    } catch (const Error& e) {
                        rec.failed = true;
                        rec.failure = e.what();
                    }
                }
                if (!rec.failed && !mases.empty()) {
                    double sum = 0.0;
                    for (double v : mases) {
                        sum += v;
                    }
                    rec.mase = sum / static_cast<double>(mases.size());
                }
                const auto mi = rec.method == Method::Raf ? 1 : 0;
                ++total_cells[mi];
                if (rec.failed) {
                    ++failed_cells[mi];
                    if (first_failure[mi].empty()) {
                        first_failure[mi] = rec.failure;
                    }
                }
                table.records.push_back(std::move(rec));
            }
            task_pos += combo.eligible.size();
        }
    }

    for (int mi = 0; mi < 2; ++mi) {
        if (total_cells[mi] > 0 && failed_cells[mi] == total_cells[mi]) {
            throw Error(ErrorCode::ForecasterFailed, "every " + to_string(mi == 1 ? Method::Raf : Method::Baseline) +
                                                         " cell failed (" + std::to_string(total_cells[mi]) +
                                                         " cells); first failure: " + first_failure[mi]);
        }
    }
    return table;
}

std::vector<NamedDataset> load_datasets(const BenchConfig& config)
{
    if (config.datasets.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no datasets configured");
    }
    std::vector<NamedDataset> out;
    std::set<std::string> names;
    for (const auto& path : config.datasets) {
        if (!std::filesystem::exists(path)) {
            throw Error(ErrorCode::IoError, "dataset not found: " + path.string());
        }
        NamedDataset ds{path.stem().string(), load_dataset(path)};
        if (!names.insert(ds.name).second) {
            throw Error(ErrorCode::DuplicateId, "two datasets share the name '" + ds.name + "'");
        }
        out.push_back(std::move(ds));
    }
    return out;
}

ResultsTable run_benchmark(const BenchConfig& config)
{
    config.validate();
    const auto datasets = load_datasets(config);
    return run_benchmark(config, datasets, make_forecaster_factory(config));
}

} // namespace raf
