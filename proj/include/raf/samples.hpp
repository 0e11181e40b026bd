#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace raf {

/// num_samples x horizon matrix of sampled trajectories, row-major.
class ForecastSamples {
public:
    ForecastSamples() = default;
    ForecastSamples(std::size_t num_samples, std::size_t horizon, double fill = 0.0)
        : rows_(num_samples), cols_(horizon), data_(num_samples * horizon, fill) {}

    std::size_t num_samples() const noexcept { return rows_; }
    std::size_t horizon() const noexcept { return cols_; }

    double& at(std::size_t sample, std::size_t step) { return data_[sample * cols_ + step]; }
    double at(std::size_t sample, std::size_t step) const { return data_[sample * cols_ + step]; }

    std::span<double> row(std::size_t sample) { return {data_.data() + sample * cols_, cols_}; }
    std::span<const double> row(std::size_t sample) const { return {data_.data() + sample * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const ForecastSamples&, const ForecastSamples&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace raf
