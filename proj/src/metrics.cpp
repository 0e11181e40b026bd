#include "raf/metrics.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "raf/error.hpp"

namespace raf {

double quantile_loss(double actual, double forecast, double level)
{
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1)");
    }
    return actual >= forecast ? level * (actual - forecast) : (1.0 - level) * (forecast - actual);
}

double wql(std::span<const std::vector<double>> actuals, std::span<const QuantileForecast> forecasts)
{
    if (actuals.size() != forecasts.size() || actuals.empty()) {
        throw Error(ErrorCode::LengthMismatch, "need one quantile forecast per actual series");
    }
    const auto& levels = forecasts.front().levels;
    if (levels.empty()) {
        throw Error(ErrorCode::InvalidArgument, "quantile forecast has no levels");
    }
    double denom = 0.0;
    for (std::size_t s = 0; s < actuals.size(); ++s) {
        if (forecasts[s].levels != levels || forecasts[s].values.size() != levels.size()) {
            throw Error(ErrorCode::LengthMismatch, "every series must use the same quantile levels");
        }
        for (const auto& row : forecasts[s].values) {
            if (row.size() != actuals[s].size()) {
                throw Error(ErrorCode::LengthMismatch, "quantile forecast horizon differs from the actuals");
            }
        }
        for (double y : actuals[s]) {
            denom += std::abs(y);
        }
    }
    if (denom == 0.0) {
        throw Error(ErrorCode::AllZeroActuals, "every actual value is zero");
    }
    // The denominator is shared by every level, so the level average folds
    // into a single division.
    double num = 0.0;
    for (std::size_t q = 0; q < levels.size(); ++q) {
        for (std::size_t s = 0; s < actuals.size(); ++s) {
            const auto& row = forecasts[s].values[q];
            for (std::size_t t = 0; t < row.size(); ++t) {
                num += quantile_loss(actuals[s][t], row[t], levels[q]);
            }
        }
    }
    return 2.0 * num / (denom * static_cast<double>(levels.size()));
}

namespace {

std::optional<double> seasonal_scale(std::span<const double> history, std::size_t season)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = season; t < history.size(); ++t) {
        const double d = history[t] - history[t - season];
        if (std::isnan(d)) {
            continue;
        }
        sum += std::abs(d);
        ++count;
    }
    if (count == 0 || sum == 0.0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(count);
}

void check_mase_args(std::span<const double> actuals, std::span<const double> point_forecast, std::size_t season)
{
    if (actuals.empty() || actuals.size() != point_forecast.size()) {
        throw Error(ErrorCode::LengthMismatch, "actuals and point forecast must be non-empty and equally long");
    }
    if (season == 0) {
        throw Error(ErrorCode::InvalidArgument, "seasonality must be at least 1");
    }
}

double mean_abs_error(std::span<const double> actuals, std::span<const double> point_forecast)
{
    double err = 0.0;
    for (std::size_t t = 0; t < actuals.size(); ++t) {
        err += std::abs(actuals[t] - point_forecast[t]);
    }
    return err / static_cast<double>(actuals.size());
}

} // namespace

double mase(std::span<const double> actuals, std::span<const double> point_forecast, std::span<const double> history,
            std::size_t season)
{
    check_mase_args(actuals, point_forecast, season);
    if (history.size() <= season) {
        throw Error(ErrorCode::InvalidArgument, "history must be longer than the seasonal period");
    }
    const auto scale = seasonal_scale(history, season);
    if (!scale) {
        throw Error(ErrorCode::DegenerateScale, "seasonal-naive in-sample error is zero");
    }
    return mean_abs_error(actuals, point_forecast) / *scale;
}

std::optional<double> try_mase(std::span<const double> actuals, std::span<const double> point_forecast,
                               std::span<const double> history, std::size_t season)
{
    check_mase_args(actuals, point_forecast, season);
    if (history.size() <= season) {
        return std::nullopt;
    }
    const auto scale = seasonal_scale(history, season);
    if (!scale) {
        return std::nullopt;
    }
    return mean_abs_error(actuals, point_forecast) / *scale;
}

double relative_score(double raf_score, double baseline_score)
{
    if (!(baseline_score > 0.0)) {
        throw Error(ErrorCode::ZeroBaseline, "baseline score must be positive");
    }
    return raf_score / baseline_score;
}

double geometric_mean(std::span<const double> ratios)
{
    if (ratios.empty()) {
        throw Error(ErrorCode::EmptyInput, "geometric mean of nothing");
    }
    double log_sum = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0)) {
            throw Error(ErrorCode::NonPositiveEntry, "geometric mean needs positive entries");
        }
        log_sum += std::log(r);
    }
    return std::exp(log_sum / static_cast<double>(ratios.size()));
}

SeasonalityMap::SeasonalityMap()
    : periods_{{"hourly", 24}, {"daily", 7}, {"weekly", 1}, {"monthly", 12}, {"quarterly", 4}}
{
}

void SeasonalityMap::set(const std::string& freq, std::size_t period)
{
    if (period == 0) {
        throw Error(ErrorCode::InvalidArgument, "seasonal period for '" + freq + "' must be at least 1");
    }
    periods_[freq] = period;
}

std::size_t SeasonalityMap::period(const std::string& freq) const
{
    const auto it = periods_.find(freq);
    return it == periods_.end() ? 1 : it->second;
}

std::string to_string(Method m)
{
    return m == Method::Raf ? "raf" : "baseline";
}

std::string format_real(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_eval_csv(std::ostream& out, std::span<const EvalRecord> records)
{
    out << "dataset,method,C,H,wql,mase,excluded_mase_count\n";
    for (const auto& r : records) {
        out << r.dataset << ',' << to_string(r.method) << ',' << r.context_len << ',' << r.horizon << ',';
        if (!r.failed) {
            out << format_real(r.wql);
        }
        out << ',';
        if (!r.failed && r.mase) {
            out << format_real(*r.mase);
        }
        out << ',' << r.excluded_mase_count << '\n';
    }
}

} // namespace raf
