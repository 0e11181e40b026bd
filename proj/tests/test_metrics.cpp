#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "raf/error.hpp"
#include "raf/metrics.hpp"

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

const std::vector<double> kLevels(kDefaultQuantileLevels.begin(), kDefaultQuantileLevels.end());

QuantileForecast constant_forecast(std::size_t h, double v)
{
    QuantileForecast q;
    q.levels = kLevels;
    q.values.assign(kLevels.size(), std::vector<double>(h, v));
    return q;
}

struct Instance {
    std::vector<std::vector<double>> actuals;
    std::vector<QuantileForecast> forecasts;
};

Instance random_instance(std::mt19937_64& gen)
{
    std::uniform_int_distribution<std::size_t> ns(1, 6);
    std::uniform_int_distribution<std::size_t> hs(1, 12);
    std::normal_distribution<double> val(3.0, 5.0);
    Instance inst;
    const std::size_t n = ns(gen);
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t h = hs(gen);
        std::vector<double> a(h);
        for (auto& v : a) {
            v = val(gen);
        }
        QuantileForecast q;
        q.levels = kLevels;
        q.values.assign(kLevels.size(), std::vector<double>(h));
        for (std::size_t t = 0; t < h; ++t) {
            std::vector<double> col(kLevels.size());
            for (auto& v : col) {
                v = val(gen);
            }
            std::sort(col.begin(), col.end());
            for (std::size_t l = 0; l < kLevels.size(); ++l) {
                q.values[l][t] = col[l];
            }
        }
        inst.actuals.push_back(a);
        inst.forecasts.push_back(q);
    }
    return inst;
}

std::vector<std::vector<std::vector<double>>> as_cube(const std::vector<QuantileForecast>& f)
{
    std::vector<std::vector<std::vector<double>>> out;
    for (const auto& q : f) {
        out.push_back(q.values);
    }
    return out;
}

} // namespace

TEST_CASE("quantile loss")
{
    CHECK(quantile_loss(10, 10, 0.5) == 0.0);
    CHECK(quantile_loss(10, 8, 0.9) == doctest::Approx(1.8).epsilon(1e-15));
    CHECK(quantile_loss(8, 10, 0.9) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(code_of([] { quantile_loss(1, 1, 0.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { quantile_loss(1, 1, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("wql hand values")
{
    const std::vector<std::vector<double>> a = {{10}};
    const std::vector<QuantileForecast> f = {constant_forecast(1, 8)};
    CHECK(wql(a, f) == 0.2);

    const std::vector<std::vector<double>> ones = {{1, 1, 1, 1}};
    const std::vector<QuantileForecast> zeros = {constant_forecast(4, 0)};
    CHECK(std::fabs(wql(ones, zeros) - 1.0) < 1e-15);

    const std::vector<QuantileForecast> perfect = {constant_forecast(1, 10)};
    CHECK(wql(a, perfect) == 0.0);

    const std::vector<std::vector<double>> all_zero = {{0, 0}};
    const std::vector<QuantileForecast> z2 = {constant_forecast(2, 1)};
    CHECK(code_of([&] { wql(all_zero, z2); }) == ErrorCode::AllZeroActuals);
    CHECK(code_of([&] { wql(ones, z2); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("wql pools numerators and denominators across series")
{
    const std::vector<std::vector<double>> a = {{10}, {1}};
    const std::vector<QuantileForecast> f = {constant_forecast(1, 10), constant_forecast(1, 0)};
    // Pooled: (1/9) sum_q 2 q / 11 = 1/11.
    CHECK(wql(a, f) == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("mase hand values")
{
    const std::vector<double> hist = {1, 2, 3, 4};
    CHECK(mase(std::vector<double>{5, 6}, std::vector<double>{5.5, 6.5}, hist, 1) == 0.5);
    CHECK(mase(std::vector<double>{5, 6}, std::vector<double>{5, 6}, hist, 1) == 0.0);
    CHECK(code_of([] { mase(std::vector<double>{1}, std::vector<double>{1}, std::vector<double>{1, 2, 1, 2}, 2); }) ==
          ErrorCode::DegenerateScale);
    CHECK_FALSE(try_mase(std::vector<double>{1}, std::vector<double>{1}, std::vector<double>{1, 2, 1, 2}, 2));
    CHECK(code_of([] { mase(std::vector<double>{1}, std::vector<double>{1}, std::vector<double>{1, 2}, 2); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("mase skips pairs touching missing history")
{
    const double nan = std::nan("");
    const std::vector<double> hist = {1, 3, nan, 4, 6};
    // Valid pairs: |3-1| and |6-4|; scale 2.
    CHECK(mase(std::vector<double>{0}, std::vector<double>{1}, hist, 1) == 0.5);
}

TEST_CASE("metrics agree with straight-loop references")
{
    std::mt19937_64 gen(31337);
    std::normal_distribution<double> val(0, 4);
    std::uniform_int_distribution<std::size_t> ms(1, 12);
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = random_instance(gen);
        const double got = wql(inst.actuals, inst.forecasts);
        const double want = oracle::wql(inst.actuals, as_cube(inst.forecasts), kLevels);
        CHECK(std::fabs(got - want) <= 1e-10);

        const std::size_t m = ms(gen);
        std::vector<double> hist(m + 1 + static_cast<std::size_t>(trial % 40));
        for (auto& v : hist) {
            v = val(gen);
        }
        std::vector<double> a(1 + static_cast<std::size_t>(trial % 9));
        std::vector<double> f(a.size());
        for (std::size_t t = 0; t < a.size(); ++t) {
            a[t] = val(gen);
            f[t] = val(gen);
        }
        CHECK(std::fabs(mase(a, f, hist, m) - oracle::mase(a, f, hist, m)) <= 1e-10);
    }
}

TEST_CASE("scale and translation invariance")
{
    std::mt19937_64 gen(77);
    std::normal_distribution<double> val(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        auto inst = random_instance(gen);
        const double base = wql(inst.actuals, inst.forecasts);
        const double a = 0.01 + 100.0 * std::fabs(val(gen));
        for (auto& s : inst.actuals) {
            for (auto& v : s) {
                v *= a;
            }
        }
        for (auto& q : inst.forecasts) {
            for (auto& row : q.values) {
                for (auto& v : row) {
                    v *= a;
                }
            }
        }
        CHECK(std::fabs(wql(inst.actuals, inst.forecasts) - base) < 1e-9);

        std::vector<double> hist(30);
        std::vector<double> act(5);
        std::vector<double> fc(5);
        for (auto& v : hist) {
            v = val(gen);
        }
        for (std::size_t t = 0; t < 5; ++t) {
            act[t] = val(gen);
            fc[t] = val(gen);
        }
        const double m0 = mase(act, fc, hist, 3);
        auto shift = [](std::vector<double> v, double k, double b) {
            for (auto& x : v) {
                x = k * x + b;
            }
            return v;
        };
        CHECK(std::fabs(mase(shift(act, a, 0), shift(fc, a, 0), shift(hist, a, 0), 3) - m0) < 1e-9);
        CHECK(std::fabs(mase(shift(act, 1, 17.5), shift(fc, 1, 17.5), shift(hist, 1, 17.5), 3) - m0) < 1e-9);
    }
}

TEST_CASE("relative scores and geometric means")
{
    CHECK(relative_score(0.164, 0.168) == doctest::Approx(0.97619).epsilon(1e-5));
    CHECK(relative_score(0.048, 0.127) == doctest::Approx(0.37795).epsilon(1e-5));
    CHECK(relative_score(0.3, 0.3) == 1.0);
    CHECK(code_of([] { relative_score(1, 0); }) == ErrorCode::ZeroBaseline);

    CHECK(geometric_mean(std::vector<double>{2, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(geometric_mean(std::vector<double>{4}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(geometric_mean(std::vector<double>{1, 8}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
    CHECK(code_of([] { geometric_mean(std::vector<double>{}); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { geometric_mean(std::vector<double>{1, 0}); }) == ErrorCode::NonPositiveEntry);

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> val(0.1, 3.0);
    std::vector<double> r(10);
    std::vector<double> s(10);
    std::vector<double> rs(10);
    for (std::size_t i = 0; i < 10; ++i) {
        r[i] = val(gen);
        s[i] = val(gen);
        rs[i] = r[i] * s[i];
    }
    CHECK(std::fabs(geometric_mean(rs) - geometric_mean(r) * geometric_mean(s)) < 1e-12);
    auto shuffled = r;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    CHECK(std::fabs(geometric_mean(shuffled) - geometric_mean(r)) < 1e-12);
}

TEST_CASE("seasonality map")
{
    SeasonalityMap m;
    CHECK(m.period("hourly") == 24);
    CHECK(m.period("daily") == 7);
    CHECK(m.period("weekly") == 1);
    CHECK(m.period("monthly") == 12);
    CHECK(m.period("quarterly") == 4);
    CHECK(m.period("10_minutes") == 1);
    CHECK(m.period("") == 1);
    m.set("hourly", 168);
    CHECK(m.period("hourly") == 168);
}

TEST_CASE("eval csv layout")
{
    std::vector<EvalRecord> recs(3);
    recs[0] = {"weather", Method::Baseline, 50, 10, 0.168, 1.25, 0, 5, false, ""};
    recs[1] = {"weather", Method::Raf, 50, 10, 0.164, std::nullopt, 5, 5, false, ""};
    recs[2] = {"weather", Method::Raf, 75, 10, 0.0, std::nullopt, 0, 5, true, "boom"};
    std::ostringstream out;
    write_eval_csv(out, recs);
    CHECK(out.str() ==
          "dataset,method,C,H,wql,mase,excluded_mase_count\n"
          "weather,baseline,50,10,0.168,1.25,0\n"
          "weather,raf,50,10,0.164,,5\n"
          "weather,raf,75,10,,,0\n");
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(1e-20) == "1e-20");
    CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}
