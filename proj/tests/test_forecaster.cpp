#include <doctest.h>

#include <cmath>
#include <random>

#include "raf/error.hpp"
#include "raf/forecaster.hpp"

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

ForecastRequest request(std::vector<double> ctx, std::size_t h, std::size_t n = 3)
{
    ForecastRequest r;
    r.context = std::move(ctx);
    r.horizon = h;
    r.num_samples = n;
    return r;
}

class Scripted final : public Forecaster {
public:
    explicit Scripted(ForecastSamples out) : out_(std::move(out)) {}
    std::string name() const override { return "scripted"; }

protected:
    ForecastSamples do_forecast(const ForecastRequest&) override { return out_; }

private:
    ForecastSamples out_;
};

ForecastSamples from_rows(const std::vector<std::vector<double>>& rows)
{
    ForecastSamples s(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            s.at(i, j) = rows[i][j];
        }
    }
    return s;
}

} // namespace

TEST_CASE("zero forecaster")
{
    ZeroForecaster f;
    const auto s = f.forecast(request({1, 2, 3}, 4, 2));
    CHECK(s.num_samples() == 2);
    CHECK(s.horizon() == 4);
    for (double v : s.data()) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("seasonal naive repeats the last cycle")
{
    SeasonalNaiveForecaster f(2);
    const auto s = f.forecast(request({1, 2, 3, 4}, 3));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s.at(i, 0) == 3.0);
        CHECK(s.at(i, 1) == 4.0);
        CHECK(s.at(i, 2) == 3.0);
    }
    SeasonalNaiveForecaster longer(10);
    const auto l = longer.forecast(request({1, 2, 3}, 4, 1));
    CHECK(l.at(0, 0) == 1.0);
    CHECK(l.at(0, 3) == 1.0);
    SeasonalNaiveForecaster one(1);
    CHECK(one.forecast(request({5, 9}, 2, 1)).at(0, 1) == 9.0);
}

TEST_CASE("retrieval copy")
{
    RetrievalCopyForecaster f;
    auto r = request({1, 2, 3}, 2, 4);
    r.designated_future = std::vector<double>{7.5, -1.0};
    const auto s = f.forecast(r);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(s.at(i, 0) == 7.5);
        CHECK(s.at(i, 1) == -1.0);
    }
    const auto plain = f.forecast(request({1, 2, 3}, 2, 1));
    CHECK(plain.at(0, 0) == 3.0);
    CHECK(plain.at(0, 1) == 3.0);
    r.designated_future = std::vector<double>{1.0};
    CHECK(code_of([&] { f.forecast(r); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("request validation")
{
    ZeroForecaster f;
    CHECK(code_of([&] { f.forecast(request({}, 1)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { f.forecast(request({1, std::nan("")}, 1)); }) == ErrorCode::NonFiniteInput);
    CHECK(code_of([&] { f.forecast(request({1}, 0)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { f.forecast(request({1}, 1, 0)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { make_builtin_forecaster("oracle"); }) == ErrorCode::InvalidArgument);
    CHECK(make_builtin_forecaster("zero")->name() == "zero");
    CHECK(make_builtin_forecaster("seasonal-naive", 3)->name() == "seasonal-naive");
    CHECK(make_builtin_forecaster("retrieval-copy")->name() == "retrieval-copy");
}

TEST_CASE("output shape and finiteness are enforced")
{
    Scripted wrong_rows(ForecastSamples(2, 3));
    CHECK(code_of([&] { wrong_rows.forecast(request({1}, 3, 3)); }) == ErrorCode::ShapeMismatch);
    Scripted wrong_cols(ForecastSamples(3, 2));
    CHECK(code_of([&] { wrong_cols.forecast(request({1}, 3, 3)); }) == ErrorCode::ShapeMismatch);
    ForecastSamples bad(1, 1, std::nan(""));
    Scripted nan_out(bad);
    CHECK(code_of([&] { nan_out.forecast(request({1}, 1, 1)); }) == ErrorCode::MalformedResponse);
}

TEST_CASE("built-ins are bit-deterministic")
{
    std::mt19937_64 gen(3);
    std::normal_distribution<double> val;
    std::vector<double> ctx(40);
    for (auto& v : ctx) {
        v = val(gen);
    }
    for (const char* name : {"zero", "seasonal-naive", "retrieval-copy"}) {
        auto a = make_builtin_forecaster(name, 7);
        auto b = make_builtin_forecaster(name, 7);
        CHECK(a->forecast(request(ctx, 9, 5)) == b->forecast(request(ctx, 9, 5)));
    }
}

TEST_CASE("point forecast is the lower median")
{
    CHECK(point_forecast(from_rows({{1}, {3}, {2}})) == std::vector<double>{2});
    CHECK(point_forecast(from_rows({{4}, {1}, {3}, {2}})) == std::vector<double>{2});
    CHECK(point_forecast(from_rows({{1.5, -2}})) == std::vector<double>{1.5, -2});
    CHECK(point_forecast(from_rows({{1, 2}, {1, 2}, {1, 2}})) == std::vector<double>{1, 2});
}

TEST_CASE("empirical quantiles")
{
    const auto c = quantile_forecast(from_rows({{4}, {4}, {4}}));
    for (const auto& row : c.values) {
        CHECK(row[0] == 4.0);
    }
    const std::vector<double> half = {0.5};
    const auto q = quantile_forecast(from_rows({{0}, {10}}), half);
    CHECK(q.values[0][0] == 5.0);
    const std::vector<double> quarter = {0.25};
    CHECK(quantile_forecast(from_rows({{0}, {10}, {20}}), quarter).values[0][0] == 5.0);
    const std::vector<double> unordered = {0.5, 0.2};
    CHECK(code_of([&] { quantile_forecast(from_rows({{0}, {1}}), unordered); }) == ErrorCode::InvalidArgument);
    const std::vector<double> outside = {1.0};
    CHECK(code_of([&] { quantile_forecast(from_rows({{0}, {1}}), outside); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("quantiles are monotone and the median matches the point forecast")
{
    std::mt19937_64 gen(21);
    std::normal_distribution<double> val(0, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + 2 * static_cast<std::size_t>(trial % 15);
        ForecastSamples s(n, 6);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                s.at(i, j) = val(gen);
            }
        }
        const auto q = quantile_forecast(s);
        for (std::size_t t = 0; t < 6; ++t) {
            for (std::size_t l = 1; l < q.levels.size(); ++l) {
                CHECK(q.values[l - 1][t] <= q.values[l][t]);
            }
        }
        const auto med = point_forecast(s);
        for (std::size_t t = 0; t < 6; ++t) {
            CHECK(q.values[4][t] == med[t]);
        }
    }
}

TEST_CASE("mean trajectory")
{
    CHECK(mean_forecast(from_rows({{1, 2}, {3, 6}})) == std::vector<double>{2, 4});
}
