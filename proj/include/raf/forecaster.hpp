#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raf/metrics.hpp"
#include "raf/samples.hpp"

namespace raf {

struct ForecastRequest {
    std::vector<double> context;
    std::size_t horizon = 1;
    std::size_t num_samples = 1;
    // Auxiliary segment the caller designates as the retrieved future; only the
    // retrieval-copy built-in reads it.
    std::optional<std::vector<double>> designated_future;

    void validate() const;
};

class Forecaster {
public:
    virtual ~Forecaster() = default;

    /// Validates the request and the produced shape and finiteness.
    ForecastSamples forecast(const ForecastRequest& request);

    virtual std::string name() const = 0;
    /// Whether one instance may serve concurrent callers.
    virtual bool thread_safe() const { return true; }

protected:
    virtual ForecastSamples do_forecast(const ForecastRequest& request) = 0;
};

class ZeroForecaster final : public Forecaster {
public:
    std::string name() const override { return "zero"; }

protected:
    ForecastSamples do_forecast(const ForecastRequest& request) override;
};

/// Repeats the last `season` context values (the whole context if shorter).
class SeasonalNaiveForecaster final : public Forecaster {
public:
    explicit SeasonalNaiveForecaster(std::size_t season);
    std::string name() const override { return "seasonal-naive"; }

protected:
    ForecastSamples do_forecast(const ForecastRequest& request) override;

private:
    std::size_t season_;
};

/// Copies the designated retrieved future; without one, repeats the last context value.
class RetrievalCopyForecaster final : public Forecaster {
public:
    std::string name() const override { return "retrieval-copy"; }

protected:
    ForecastSamples do_forecast(const ForecastRequest& request) override;
};

/// "zero", "seasonal-naive" or "retrieval-copy".
std::unique_ptr<Forecaster> make_builtin_forecaster(const std::string& name, std::size_t season = 1);

/// Per-step lower median.
std::vector<double> point_forecast(const ForecastSamples& samples);

/// Per-step empirical quantiles by linear interpolation between order statistics.
QuantileForecast quantile_forecast(const ForecastSamples& samples,
                                   std::span<const double> levels = kDefaultQuantileLevels);

/// Per-step mean trajectory.
std::vector<double> mean_forecast(const ForecastSamples& samples);

} // namespace raf
