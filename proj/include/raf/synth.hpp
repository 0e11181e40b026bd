#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace raf {

class Forecaster;

enum class RotationMode { RandomOrthonormal, Identity };

// f1, f2 and phase defaults are arbitrary; any pair of distinct
// frequencies below 0.5 works.
struct SynthConfig {
    std::size_t context_len = 30;
    std::size_t horizon = 30;
    double f1 = 0.05;
    double f2 = 0.13;
    double phase = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 42;
    std::size_t num_instances = 200;
    std::size_t num_model_samples = 20;
    RotationMode rotation = RotationMode::RandomOrthonormal;

    std::size_t length() const noexcept { return context_len + horizon; }
    void validate() const;
};

struct SynthSignal {
    std::vector<double> signal;  // s = Q * base
    Eigen::MatrixXd rotation;    // Q
};

SynthSignal generate_signal(const SynthConfig& config, std::uint64_t instance_seed);

/// Orthonormal factor of a seeded Gaussian n x n matrix, columns sign-fixed so R has a positive diagonal.
Eigen::MatrixXd random_orthonormal(std::size_t n, std::uint64_t seed);

std::vector<double> make_noisy_copy(std::span<const double> signal, double sigma, std::uint64_t noise_seed);

/// [s_r[0, C), s_r[C, C+H), s[0, C)], no normalization or alignment.
std::vector<double> assemble_raf_query(std::span<const double> signal, std::span<const double> retrieved,
                                       std::size_t context_len, std::size_t horizon);

/// MSE(pred, truth) / MSE(0, truth).
double scaled_mse(std::span<const double> prediction, std::span<const double> truth);

struct SweepPoint {
    double snr = 0.0;
    double mean_sigma = 0.0;
    double mean_scaled_mse = 0.0;
    double stderr_scaled_mse = 0.0;
    std::size_t num_instances = 0;
    std::vector<double> per_instance;  // scaled MSE per instance, instance order
};

/// Population variance, used to set sigma^2 = Var(s) / snr per instance.
double population_variance(std::span<const double> values);

/// Parallel over (snr, instance) pairs when the forecaster is thread safe;
/// seeds derive from (config.seed, instance, snr index) so results never
/// depend on scheduling.
std::vector<SweepPoint> snr_sweep(const SynthConfig& config, Forecaster& forecaster, std::span<const double> snr_grid,
                                  bool parallel = true);

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points);

} // namespace raf
