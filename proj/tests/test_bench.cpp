#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "raf/bench.hpp"
#include "raf/error.hpp"

using namespace raf;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

std::vector<double> sine(std::size_t n, double period, double phase, double level = 0.0)
{
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
        v[t] = level + std::sin(2 * std::numbers::pi * static_cast<double>(t) / period + phase);
    }
    return v;
}

NamedDataset noisy_sines(const std::string& name, std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0, 0.2);
    std::uniform_int_distribution<std::size_t> len(40, 90);
    NamedDataset ds{name, {}};
    for (std::size_t i = 0; i < count; ++i) {
        auto v = sine(len(gen), 12, 0.3 * static_cast<double>(i), 5.0);
        for (auto& x : v) {
            x += noise(gen);
        }
        if (i % 7 == 3) {
            v[v.size() / 2] = std::nan("");
        }
        ds.series.push_back({name + "-" + std::to_string(i), "hourly", v});
    }
    return ds;
}

BenchConfig small_config()
{
    BenchConfig cfg;
    cfg.context_lengths = {8, 16};
    cfg.horizons = {4, 6};
    cfg.num_samples = 5;
    cfg.seasonal_period = 12;
    cfg.forecaster = "seasonal-naive";
    return cfg;
}

std::string render(const ResultsTable& t)
{
    std::ostringstream out;
    write_cells_csv(out, t);
    write_failures_csv(out, t);
    write_counts_csv(out, t);
    write_aggregate_csv(out, aggregate(t));
    return out.str();
}

class ThrowOnLength final : public Forecaster {
public:
    explicit ThrowOnLength(std::size_t len) : len_(len) {}
    std::string name() const override { return "throw-on-length"; }

protected:
    ForecastSamples do_forecast(const ForecastRequest& r) override
    {
        if (len_ == 0 || r.context.size() == len_) {
            throw Error(ErrorCode::AdapterError, "refused length " + std::to_string(r.context.size()));
        }
        return ForecastSamples(r.num_samples, r.horizon, r.context.back());
    }

private:
    std::size_t len_;
};

EvalRecord cell(const std::string& ds, Method m, std::size_t c, std::size_t h, double wql, double mase)
{
    return EvalRecord{ds, m, c, h, wql, mase, 0, 1, false, ""};
}

} // namespace

TEST_CASE("planted self-match: retrieval beats the baseline")
{
    // Every series is the same sine, so each test tail has an exact database twin.
    NamedDataset ds{"planted", {}};
    for (int i = 0; i < 10; ++i) {
        ds.series.push_back({"s" + std::to_string(i), "", sine(72, 12, 0.0, 3.0)});
    }
    BenchConfig cfg = small_config();
    cfg.forecaster = "retrieval-copy";
    const std::vector<NamedDataset> all = {ds};
    const auto table = run_benchmark(cfg, all, make_forecaster_factory(cfg));
    REQUIRE(table.records.size() == 8);
    for (std::size_t i = 0; i < table.records.size(); i += 2) {
        const auto& base = table.records[i];
        const auto& raf = table.records[i + 1];
        REQUIRE(base.method == Method::Baseline);
        REQUIRE(raf.method == Method::Raf);
        CHECK_FALSE(raf.failed);
        CHECK(raf.wql < 1e-12);
        CHECK(base.wql > 0.01);
    }
}

TEST_CASE("zero forecaster on a constant series")
{
    NamedDataset ds{"ones", {}};
    for (int i = 0; i < 10; ++i) {
        ds.series.push_back({"s" + std::to_string(i), "", std::vector<double>(40, 1.0)});
    }
    BenchConfig cfg = small_config();
    cfg.forecaster = "zero";
    const std::vector<NamedDataset> all = {ds};
    const auto table = run_benchmark(cfg, all, make_forecaster_factory(cfg));
    for (const auto& r : table.records) {
        CHECK_FALSE(r.failed);
        // The pipeline adds the context mean back, so a zero forecast becomes the constant.
        CHECK(r.wql == 0.0);
        CHECK_FALSE(r.mase);
        CHECK(r.excluded_mase_count == r.evaluated);
    }
}

TEST_CASE("counts account for every series")
{
    const std::vector<NamedDataset> all = {noisy_sines("a", 40, 1), noisy_sines("b", 23, 2)};
    BenchConfig cfg = small_config();
    cfg.context_lengths = {8, 60};
    cfg.validation_fraction = 0.1;
    const auto table = run_benchmark(cfg, all, make_forecaster_factory(cfg));
    REQUIRE(table.counts.size() == 8);
    for (const auto& c : table.counts) {
        const std::size_t n = c.dataset == "a" ? 40 : 23;
        CHECK(c.database + c.validation + c.evaluated + c.skipped == n);
        CHECK(c.validation > 0);
    }
    // Series of length 40..90 cannot all host C=60 plus the horizon.
    const auto long_cell = std::find_if(table.counts.begin(), table.counts.end(),
                                        [](const CellCounts& c) { return c.context_len == 60; });
    CHECK(long_cell->skipped > 0);
}

TEST_CASE("results are identical across runs and thread counts")
{
    const std::vector<NamedDataset> all = {noisy_sines("a", 30, 3), noisy_sines("b", 18, 4)};
    BenchConfig cfg = small_config();
    cfg.threads = 1;
    const auto serial = render(run_benchmark(cfg, all, make_forecaster_factory(cfg)));
    CHECK(render(run_benchmark(cfg, all, make_forecaster_factory(cfg))) == serial);
    cfg.threads = 4;
    CHECK(render(run_benchmark(cfg, all, make_forecaster_factory(cfg))) == serial);
    cfg.seed = 43;
    CHECK(render(run_benchmark(cfg, all, make_forecaster_factory(cfg))) != serial);
}

TEST_CASE("failed cells are recorded, not fatal")
{
    const std::vector<NamedDataset> all = {noisy_sines("a", 30, 5)};
    BenchConfig cfg = small_config();
    // Baseline requests carry exactly C values; refuse C = 8.
    const auto table = run_benchmark(cfg, all, [] { return std::make_unique<ThrowOnLength>(8); });
    std::size_t failed = 0;
    for (const auto& r : table.records) {
        const bool expect = r.method == Method::Baseline && r.context_len == 8;
        CHECK(r.failed == expect);
        if (r.failed) {
            ++failed;
            CHECK(r.failure.find("series ") == 0);
            CHECK(r.failure.find("refused length 8") != std::string::npos);
        }
    }
    CHECK(failed == 2);
    std::ostringstream out;
    write_failures_csv(out, table);
    const auto text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    const auto report = aggregate(table);
    CHECK_FALSE(report.find("relative", "wql", "a", 8, "", "default"));
    CHECK(report.find("relative", "wql", "a", 16, "", "default"));

    CHECK(code_of([&] { run_benchmark(cfg, all, [] { return std::make_unique<ThrowOnLength>(0); }); }) ==
          ErrorCode::ForecasterFailed);
}

TEST_CASE("forecast_series preconditions")
{
    ZeroForecaster zero;
    const auto ctx = sine(10, 5, 0.1);
    CHECK(code_of([&] { forecast_series(Method::Raf, ctx, 3, 2, zero, nullptr); }) == ErrorCode::EmptyIndex);
    const std::vector<TimeSeries> db = {{"d", "", sine(40, 5, 0.0)}};
    const auto index = build_index(db, 10, 4, 1);
    CHECK(code_of([&] { forecast_series(Method::Raf, ctx, 3, 2, zero, &index); }) == ErrorCode::InvalidArgument);
    const auto s = forecast_series(Method::Raf, ctx, 4, 2, zero, &index);
    CHECK(s.num_samples() == 2);
    CHECK(s.horizon() == 4);
}

TEST_CASE("aggregation hand values")
{
    ResultsTable t;
    t.benchmark_of["w"] = "bench";
    t.records = {cell("w", Method::Baseline, 50, 10, 0.168, 1.0), cell("w", Method::Raf, 50, 10, 0.164, 1.0)};
    const auto r = aggregate(t);
    CHECK(*r.find("relative", "wql", "w", 50, "", "bench") == doctest::Approx(0.97619).epsilon(1e-5));
    CHECK(*r.find("dataset", "wql", "w", std::nullopt, "", "bench") == doctest::Approx(0.97619).epsilon(1e-5));
    CHECK(*r.find("overall", "wql") == doctest::Approx(0.97619).epsilon(1e-5));
    CHECK(*r.find("mean", "wql", "w", 50, "raf", "bench") == 0.164);

    ResultsTable two;
    two.records = {cell("d", Method::Baseline, 8, 1, 1.0, 1.0), cell("d", Method::Raf, 8, 1, 2.0, 1.0),
                   cell("d", Method::Baseline, 16, 1, 1.0, 1.0), cell("d", Method::Raf, 16, 1, 0.5, 1.0)};
    CHECK(*aggregate(two).find("dataset", "wql", "d", std::nullopt, "", "default") ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("a constant ratio reaches every aggregation level")
{
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> val(0.05, 2.0);
    ResultsTable t;
    for (const char* ds : {"a", "b", "c", "d"}) {
        t.benchmark_of[ds] = std::string(ds) < "c" ? "one" : "two";
        for (std::size_t c : {8u, 16u, 32u}) {
            for (std::size_t h : {4u, 12u}) {
                const double w = val(gen);
                const double m = val(gen);
                t.records.push_back(cell(ds, Method::Baseline, c, h, w, m));
                t.records.push_back(cell(ds, Method::Raf, c, h, 0.8 * w, 0.8 * m));
            }
        }
    }
    const auto r = aggregate(t);
    std::size_t checked = 0;
    for (const auto& row : r.rows) {
        if (row.level != "mean") {
            CHECK(std::fabs(row.value - 0.8) < 1e-12);
            ++checked;
        }
    }
    // 12 relative + 4 dataset + 2 benchmark + 1 overall, per metric.
    CHECK(checked == 38);

    auto shuffled = t;
    std::shuffle(shuffled.records.begin(), shuffled.records.end(), gen);
    const auto p = aggregate(shuffled);
    for (const char* metric : {"wql", "mase"}) {
        CHECK(std::fabs(*p.find("overall", metric) - *r.find("overall", metric)) < 1e-12);
        CHECK(std::fabs(*p.find("benchmark", metric, "", std::nullopt, "", "two") -
                        *r.find("benchmark", metric, "", std::nullopt, "", "two")) < 1e-12);
    }
}

TEST_CASE("aggregation edge cases")
{
    ResultsTable missing;
    missing.records = {cell("d", Method::Baseline, 8, 1, 1.0, 1.0), cell("d", Method::Raf, 8, 2, 1.0, 1.0)};
    CHECK(code_of([&] { aggregate(missing); }) == ErrorCode::MissingBaselineCell);

    ResultsTable raf_only;
    raf_only.records = {cell("d", Method::Raf, 8, 1, 0.3, 1.0)};
    const auto r = aggregate(raf_only);
    CHECK(r.find("mean", "wql", "d", 8, "raf", "default") == 0.3);
    CHECK_FALSE(r.find("overall", "wql"));
    CHECK_FALSE(r.notes.empty());

    ResultsTable zero_base;
    zero_base.records = {cell("d", Method::Baseline, 8, 1, 0.0, 1.0), cell("d", Method::Raf, 8, 1, 0.1, 1.0)};
    const auto z = aggregate(zero_base);
    CHECK_FALSE(z.find("relative", "wql", "d", 8, "", "default"));
    CHECK(z.find("relative", "mase", "d", 8, "", "default") == 1.0);

    ResultsTable perfect;
    perfect.records = {cell("d", Method::Baseline, 8, 1, 0.2, 1.0), cell("d", Method::Raf, 8, 1, 0.0, 1.0)};
    const auto q = aggregate(perfect);
    CHECK(q.find("relative", "wql", "d", 8, "", "default") == 0.0);
    CHECK_FALSE(q.find("dataset", "wql", "d", std::nullopt, "", "default"));
}

TEST_CASE("bench config keys")
{
    const auto kv = KeyValueConfig::parse(R"(
datasets = ["x.jsonl", "y.jsonl"]
benchmark = "suite"
context_lengths = [50, 100]
horizons = [10]
test_fraction = 0.3
validation_fraction = 0.1
seed = 9
stride = 2
num_samples = 7
forecaster = "zero"
seasonal_period = 24
adapter = "python3 -m shim"
adapter_timeout_s = 1.5
adapter_embeddings = true
methods = ["raf"]
threads = 3
[seasonality]
hourly = 168
)");
    const auto bc = bench_config_from(kv);
    CHECK(bc.datasets.size() == 2);
    CHECK(bc.benchmark == "suite");
    CHECK(bc.context_lengths == std::vector<std::size_t>{50, 100});
    CHECK(bc.horizons == std::vector<std::size_t>{10});
    CHECK(bc.test_fraction == 0.3);
    CHECK(bc.validation_fraction == 0.1);
    CHECK(bc.seed == 9);
    CHECK(bc.stride == 2);
    CHECK(bc.num_samples == 7);
    CHECK(bc.forecaster == "zero");
    CHECK(bc.seasonal_period == 24);
    CHECK(bc.adapter == "python3 -m shim");
    CHECK(bc.adapter_timeout == std::chrono::milliseconds(1500));
    CHECK(bc.adapter_embeddings);
    CHECK(bc.methods == std::vector<Method>{Method::Raf});
    CHECK(bc.threads == 3);
    CHECK(bc.seasonality.period("hourly") == 168);
    CHECK_NOTHROW(bc.validate());

    CHECK(code_of([] { bench_config_from(KeyValueConfig::parse("horizon = 3\n")); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { bench_config_from(KeyValueConfig::parse("methods = [\"raff\"]\n")); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { bench_config_from(KeyValueConfig::parse("stride = -1\n")); }) == ErrorCode::InvalidArgument);

    BenchConfig bad = small_config();
    bad.context_lengths = {1};
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
    bad = small_config();
    bad.methods = {Method::Raf, Method::Raf};
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
    bad = small_config();
    bad.forecaster = "oracle";
    CHECK(code_of([&] { make_forecaster_factory(bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("dataset loading")
{
    BenchConfig cfg = small_config();
    CHECK(code_of([&] { load_datasets(cfg); }) == ErrorCode::InvalidArgument);
    cfg.datasets = {"/nonexistent/weather.jsonl"};
    try {
        load_datasets(cfg);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
        CHECK(std::string(e.what()).find("/nonexistent/weather.jsonl") != std::string::npos);
    }
}
