#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace raf {

inline constexpr std::array<double, 9> kDefaultQuantileLevels = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

/// values[level][step], nondecreasing in level at every step.
struct QuantileForecast {
    std::vector<double> levels;
    std::vector<std::vector<double>> values;

    std::size_t horizon() const noexcept { return values.empty() ? 0 : values.front().size(); }
};

/// Pinball loss: q (y - yhat) when y >= yhat, else (1 - q)(yhat - y).
double quantile_loss(double actual, double forecast, double level);

/// Weighted quantile loss; numerators and denominators are pooled over
/// every series and step before dividing, then averaged over levels.
double wql(std::span<const std::vector<double>> actuals, std::span<const QuantileForecast> forecasts);

/// Mean absolute error over the mean absolute seasonal difference of history.
/// Pairs touching a missing history value are skipped. Throws DegenerateScale
/// when that scale is zero.
double mase(std::span<const double> actuals, std::span<const double> point_forecast, std::span<const double> history,
            std::size_t season);

/// As mase(), but a degenerate scale (or too little history) yields nullopt.
std::optional<double> try_mase(std::span<const double> actuals, std::span<const double> point_forecast,
                               std::span<const double> history, std::size_t season);

double relative_score(double raf_score, double baseline_score);

double geometric_mean(std::span<const double> ratios);

/// Seasonal period per frequency tag, with user overrides.
class SeasonalityMap {
public:
    SeasonalityMap();
    void set(const std::string& freq, std::size_t period);
    std::size_t period(const std::string& freq) const;

private:
    std::map<std::string, std::size_t> periods_;
};

enum class Method { Baseline, Raf };
std::string to_string(Method m);

struct EvalRecord {
    std::string dataset;
    Method method = Method::Baseline;
    std::size_t context_len = 0;
    std::size_t horizon = 0;
    double wql = 0.0;
    std::optional<double> mase;  // nullopt when every series had a degenerate scale
    std::size_t excluded_mase_count = 0;
    std::size_t evaluated = 0;
    bool failed = false;
    std::string failure;
};

/// Header: dataset,method,C,H,wql,mase,excluded_mase_count. Failed cells keep
/// empty wql/mase fields; an undefined MASE is written as an empty field too.
void write_eval_csv(std::ostream& out, std::span<const EvalRecord> records);

/// Shortest decimal that round-trips to the same double.
std::string format_real(double v);

} // namespace raf
