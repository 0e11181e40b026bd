#include "raf/forecaster.hpp"

#include <algorithm>
#include <cmath>

#include "raf/error.hpp"
#include "raf/series.hpp"

namespace raf {

void ForecastRequest::validate() const
{
    if (context.empty()) {
        throw Error(ErrorCode::InvalidArgument, "forecast context is empty");
    }
    if (!all_finite(context)) {
        throw Error(ErrorCode::NonFiniteInput, "forecast context contains non-finite values");
    }
    if (horizon == 0 || num_samples == 0) {
        throw Error(ErrorCode::InvalidArgument, "horizon and num_samples must be at least 1");
    }
    if (designated_future && !all_finite(*designated_future)) {
        throw Error(ErrorCode::NonFiniteInput, "designated future contains non-finite values");
    }
}

ForecastSamples Forecaster::forecast(const ForecastRequest& request)
{
    request.validate();
    auto samples = do_forecast(request);
    if (samples.num_samples() != request.num_samples || samples.horizon() != request.horizon) {
        throw Error(ErrorCode::ShapeMismatch, name() + " returned " + std::to_string(samples.num_samples()) + "x" +
                                                  std::to_string(samples.horizon()) + ", expected " +
                                                  std::to_string(request.num_samples) + "x" +
                                                  std::to_string(request.horizon));
    }
    if (!all_finite(samples.data())) {
        throw Error(ErrorCode::MalformedResponse, name() + " returned non-finite samples");
    }
    return samples;
}

ForecastSamples ZeroForecaster::do_forecast(const ForecastRequest& request)
{
    return ForecastSamples(request.num_samples, request.horizon, 0.0);
}

SeasonalNaiveForecaster::SeasonalNaiveForecaster(std::size_t season) : season_(season)
{
    if (season == 0) {
        throw Error(ErrorCode::InvalidArgument, "seasonal-naive period must be at least 1");
    }
}

ForecastSamples SeasonalNaiveForecaster::do_forecast(const ForecastRequest& request)
{
    const auto& ctx = request.context;
    const std::size_t m = std::min(season_, ctx.size());
    const std::size_t base = ctx.size() - m;
    ForecastSamples out(request.num_samples, request.horizon);
    for (std::size_t s = 0; s < request.num_samples; ++s) {
        for (std::size_t h = 0; h < request.horizon; ++h) {
            out.at(s, h) = ctx[base + h % m];
        }
    }
    return out;
}

ForecastSamples RetrievalCopyForecaster::do_forecast(const ForecastRequest& request)
{
    ForecastSamples out(request.num_samples, request.horizon, request.context.back());
    if (!request.designated_future) {
        return out;
    }
    const auto& fut = *request.designated_future;
    if (fut.size() < request.horizon) {
        throw Error(ErrorCode::ShapeMismatch, "designated future is shorter than the horizon");
    }
    for (std::size_t s = 0; s < request.num_samples; ++s) {
        std::copy_n(fut.begin(), request.horizon, out.row(s).begin());
    }
    return out;
}

std::unique_ptr<Forecaster> make_builtin_forecaster(const std::string& name, std::size_t season)
{
    if (name == "zero") {
        return std::make_unique<ZeroForecaster>();
    }
    if (name == "seasonal-naive") {
        return std::make_unique<SeasonalNaiveForecaster>(season);
    }
    if (name == "retrieval-copy") {
        return std::make_unique<RetrievalCopyForecaster>();
    }
    throw Error(ErrorCode::InvalidArgument, "unknown built-in forecaster '" + name + "'");
}

namespace {

std::vector<double> column(const ForecastSamples& samples, std::size_t step)
{
    std::vector<double> col(samples.num_samples());
    for (std::size_t s = 0; s < samples.num_samples(); ++s) {
        col[s] = samples.at(s, step);
    }
    return col;
}

} // namespace

std::vector<double> point_forecast(const ForecastSamples& samples)
{
    if (samples.num_samples() == 0) {
        throw Error(ErrorCode::EmptyInput, "no samples to reduce");
    }
    std::vector<double> out(samples.horizon());
    for (std::size_t h = 0; h < samples.horizon(); ++h) {
        auto col = column(samples, h);
        const std::size_t mid = (col.size() - 1) / 2;
        std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(mid), col.end());
        out[h] = col[mid];
    }
    return out;
}

QuantileForecast quantile_forecast(const ForecastSamples& samples, std::span<const double> levels)
{
    if (samples.num_samples() == 0) {
        throw Error(ErrorCode::EmptyInput, "no samples to reduce");
    }
    for (std::size_t q = 0; q < levels.size(); ++q) {
        if (!(levels[q] > 0.0 && levels[q] < 1.0) || (q > 0 && levels[q] <= levels[q - 1])) {
            throw Error(ErrorCode::InvalidArgument, "quantile levels must be increasing inside (0, 1)");
        }
    }
    QuantileForecast qf;
    qf.levels.assign(levels.begin(), levels.end());
    qf.values.assign(levels.size(), std::vector<double>(samples.horizon()));
    std::vector<double> per_step(levels.size());
    for (std::size_t h = 0; h < samples.horizon(); ++h) {
        auto col = column(samples, h);
        std::sort(col.begin(), col.end());
        const double last = static_cast<double>(col.size() - 1);
        for (std::size_t q = 0; q < levels.size(); ++q) {
            const double pos = levels[q] * last;
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const std::size_t hi = std::min(lo + 1, col.size() - 1);
            const double frac = pos - static_cast<double>(lo);
            per_step[q] = frac == 0.0 ? col[lo] : col[lo] + frac * (col[hi] - col[lo]);
        }
        // Rounding near order statistics can break monotonicity by an ulp.
        std::sort(per_step.begin(), per_step.end());
        for (std::size_t q = 0; q < levels.size(); ++q) {
            qf.values[q][h] = per_step[q];
        }
    }
    return qf;
}

std::vector<double> mean_forecast(const ForecastSamples& samples)
{
    if (samples.num_samples() == 0) {
        throw Error(ErrorCode::EmptyInput, "no samples to reduce");
    }
    std::vector<double> out(samples.horizon(), 0.0);
    for (std::size_t s = 0; s < samples.num_samples(); ++s) {
        for (std::size_t h = 0; h < samples.horizon(); ++h) {
            out[h] += samples.at(s, h);
        }
    }
    for (auto& v : out) {
        v /= static_cast<double>(samples.num_samples());
    }
    return out;
}

} // namespace raf
