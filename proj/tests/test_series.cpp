#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "raf/error.hpp"
#include "raf/series.hpp"

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

} // namespace

TEST_CASE("instance_normalize on [1,2,3]")
{
    const std::vector<double> x = {1, 2, 3};
    const auto n = instance_normalize(x);
    CHECK(n.stats.mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(n.stats.std == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK_FALSE(n.stats.degenerate);
    CHECK(n.values[0] == doctest::Approx(-1.224744871391589).epsilon(1e-14));
    CHECK(n.values[1] == 0.0);
    CHECK(n.values[2] == doctest::Approx(1.224744871391589).epsilon(1e-14));
}

TEST_CASE("constant input is degenerate")
{
    const std::vector<double> x = {5, 5, 5};
    const auto n = instance_normalize(x);
    CHECK(n.stats.degenerate);
    CHECK(n.stats.mean == 5.0);
    CHECK(n.stats.std == 1.0);
    for (double v : n.values) {
        CHECK(v == 0.0);
    }
    CHECK(denormalize(std::vector<double>{0, 0}, NormStats{7, 1, true}) == std::vector<double>{7, 7});
}

TEST_CASE("already standardized input is unchanged")
{
    const std::vector<double> x = {-1, 1, -1, 1};
    const auto n = instance_normalize(x);
    CHECK(n.stats.mean == 0.0);
    CHECK(n.stats.std == 1.0);
    CHECK(n.values == x);
}

TEST_CASE("normalize errors")
{
    CHECK(code_of([] { instance_normalize(std::vector<double>{}); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { instance_normalize(std::vector<double>{1, std::nan(""), 2}); }) == ErrorCode::NonFiniteInput);
    CHECK(code_of([] { instance_normalize(std::vector<double>{1, std::numeric_limits<double>::infinity()}); }) ==
          ErrorCode::NonFiniteInput);
}

TEST_CASE("normalize matches the moment oracle and round-trips")
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> val(-50, 50);
    std::uniform_int_distribution<int> len(1, 200);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x(static_cast<std::size_t>(len(gen)));
        for (auto& v : x) {
            v = val(gen);
        }
        const auto n = instance_normalize(x);
        if (x.size() == 1) {
            CHECK(n.stats.degenerate);
            continue;
        }
        CHECK(n.stats.mean == doctest::Approx(oracle::mean(x)).epsilon(1e-12));
        CHECK(n.stats.std == doctest::Approx(oracle::population_std(x)).epsilon(1e-12));
        CHECK(std::fabs(oracle::mean(n.values)) < 1e-12);
        CHECK(oracle::population_std(n.values) == doctest::Approx(1.0).epsilon(1e-12));
        const auto back = denormalize(n.values, n.stats);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(std::fabs(back[i] - x[i]) <= 1e-12 * std::max(1.0, std::fabs(x[i])));
        }
    }
}

TEST_CASE("normalization is scale and shift equivariant")
{
    std::mt19937_64 gen(5);
    std::normal_distribution<double> val;
    std::vector<double> x(64);
    for (auto& v : x) {
        v = val(gen);
    }
    for (double a : {0.001, 3.0, 1e4}) {
        for (double b : {-100.0, 0.0, 7.5}) {
            std::vector<double> y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                y[i] = a * x[i] + b;
            }
            const auto nx = instance_normalize(x);
            const auto ny = instance_normalize(y);
            for (std::size_t i = 0; i < x.size(); ++i) {
                CHECK(std::fabs(nx.values[i] - ny.values[i]) < 1e-9);
            }
        }
    }
}

TEST_CASE("extract_patches enumerates stride-1 windows")
{
    const std::vector<double> x = {1, 2, 3, 4};
    auto p = extract_patches(x, 2);
    REQUIRE(p.patches.size() == 3);
    CHECK(p.patches[0].values == std::vector<double>{1, 2});
    CHECK(p.patches[1].values == std::vector<double>{2, 3});
    CHECK(p.patches[2].values == std::vector<double>{3, 4});
    CHECK(p.patches[2].start == 2);
    p = extract_patches(x, 4);
    REQUIRE(p.patches.size() == 1);
    CHECK(p.patches[0].values == x);
    CHECK(code_of([&] { extract_patches(x, 5); }) == ErrorCode::WindowTooLong);
    CHECK(code_of([&] { extract_patches(x, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("extract_patches agrees with brute force and flags gaps")
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> val(-1, 1);
    std::uniform_int_distribution<std::size_t> len_dist(1, 60);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = trial == 0 ? 50 : len_dist(gen);
        std::vector<double> x(len);
        for (auto& v : x) {
            v = val(gen);
        }
        if (trial % 3 == 0 && len > 2) {
            x[len / 2] = std::nan("");
        }
        const std::size_t c = trial == 0 ? 8 : std::uniform_int_distribution<std::size_t>(1, len)(gen);
        const auto p = extract_patches(x, c);
        REQUIRE(p.patches.size() == len - c + 1);
        for (std::size_t k = 0; k + c <= len; ++k) {
            bool gap = false;
            for (std::size_t j = 0; j < c; ++j) {
                const double a = p.patches[k].values[j];
                const double b = x[k + j];
                CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
                gap |= std::isnan(b);
            }
            CHECK(p.has_gap[k] == gap);
        }
    }
}

TEST_CASE("embed_patch direction and norm")
{
    const auto t = embed_patch(std::vector<double>{3, 4});
    CHECK(t.norm == 5.0);
    CHECK(t.direction[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(t.direction[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(decode_embedding(EmbeddedToken{{0.6, 0.8}, 5.0})[0] == doctest::Approx(3.0).epsilon(1e-15));

    const auto z = embed_patch(std::vector<double>{0, 0});
    CHECK(z.norm == 0.0);
    CHECK(z.direction == std::vector<double>{0, 0});
    CHECK(decode_embedding(z) == std::vector<double>{0, 0});
}

TEST_CASE("embed and decode round-trip on random patches")
{
    std::mt19937_64 gen(17);
    std::normal_distribution<double> val(0, 10);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(1 + static_cast<std::size_t>(trial % 16));
        for (auto& v : p) {
            v = val(gen);
        }
        const auto t = embed_patch(p);
        double len2 = 0.0;
        for (double d : t.direction) {
            len2 += d * d;
        }
        CHECK(std::fabs(std::sqrt(len2) - 1.0) < 1e-12);
        const auto back = decode_embedding(t);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::fabs(back[i] - p[i]) <= 1e-12 * std::max(1.0, std::fabs(p[i])));
        }
        const auto again = embed_patch(back);
        CHECK(std::fabs(again.norm - t.norm) <= 1e-12 * t.norm);
    }
}
