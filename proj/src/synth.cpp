#include "raf/synth.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "raf/error.hpp"
#include "raf/forecaster.hpp"
#include "raf/metrics.hpp"
#include "raf/rng.hpp"

namespace raf {

void SynthConfig::validate() const
{
    if (context_len == 0 || horizon == 0) {
        throw Error(ErrorCode::InvalidArgument, "synthetic C and H must be at least 1");
    }
    if (!(sigma >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "noise sigma must be non-negative");
    }
    if (num_model_samples == 0 || num_instances == 0) {
        throw Error(ErrorCode::InvalidArgument, "num_instances and num_model_samples must be at least 1");
    }
}

Eigen::MatrixXd random_orthonormal(std::size_t n, std::uint64_t seed)
{
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd gaussian(dim, dim);
    Rng rng(seed);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            gaussian(r, c) = rng.normal();
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::MatrixXd& packed = qr.matrixQR();
    for (Eigen::Index j = 0; j < dim; ++j) {
        if (packed(j, j) < 0.0) {
            q.col(j) *= -1.0;
        }
    }
    return q;
}

SynthSignal generate_signal(const SynthConfig& config, std::uint64_t instance_seed)
{
    config.validate();
    const std::size_t len = config.length();
    Eigen::VectorXd base(static_cast<Eigen::Index>(len));
    for (std::size_t t = 0; t < len; ++t) {
        const double tt = static_cast<double>(t);
        base(static_cast<Eigen::Index>(t)) = std::sin(std::numbers::pi * config.f1 * tt + config.phase) +
                                             std::sin(std::numbers::pi * config.f2 * tt + config.phase);
    }
    SynthSignal out;
    out.rotation = config.rotation == RotationMode::Identity
                       ? Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len))
                       : random_orthonormal(len, instance_seed);
    const Eigen::VectorXd s = out.rotation * base;
    out.signal.assign(s.data(), s.data() + s.size());
    return out;
}

std::vector<double> make_noisy_copy(std::span<const double> signal, double sigma, std::uint64_t noise_seed)
{
    if (!(sigma >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "noise sigma must be non-negative");
    }
    std::vector<double> out(signal.begin(), signal.end());
    if (sigma == 0.0) {
        return out;
    }
    Rng rng(noise_seed);
    for (auto& v : out) {
        v += sigma * rng.normal();
    }
    return out;
}

std::vector<double> assemble_raf_query(std::span<const double> signal, std::span<const double> retrieved,
                                       std::size_t context_len, std::size_t horizon)
{
    const std::size_t len = context_len + horizon;
    if (signal.size() != len || retrieved.size() != len) {
        throw Error(ErrorCode::LengthMismatch, "signal and retrieved copy must both have length C + H");
    }
    std::vector<double> out(retrieved.begin(), retrieved.end());
    out.insert(out.end(), signal.begin(), signal.begin() + static_cast<std::ptrdiff_t>(context_len));
    return out;
}

double scaled_mse(std::span<const double> prediction, std::span<const double> truth)
{
    if (prediction.size() != truth.size() || truth.empty()) {
        throw Error(ErrorCode::LengthMismatch, "prediction and truth must be non-empty and equally long");
    }
    double err = 0.0;
    double base = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = prediction[i] - truth[i];
        err += d * d;
        base += truth[i] * truth[i];
    }
    if (base == 0.0) {
        throw Error(ErrorCode::ZeroTruth, "truth is identically zero");
    }
    return err / base;
}

double population_variance(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "variance of nothing");
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return ss / static_cast<double>(values.size());
}

namespace {

struct PairResult {
    double sigma = 0.0;
    double score = 0.0;
    std::string error;
};

PairResult run_pair(const SynthConfig& config, Forecaster& forecaster, double snr, std::size_t instance,
                    std::size_t snr_index)
{
    const auto sig = generate_signal(config, derive_seed(config.seed, instance, 0));
    const auto& s = sig.signal;
    PairResult r;
    r.sigma = std::sqrt(population_variance(s) / snr);
    const auto noisy = make_noisy_copy(s, r.sigma, derive_seed(config.seed, instance, snr_index + 1));

    const std::size_t c = config.context_len;
    const std::size_t h = config.horizon;
    ForecastRequest req;
    req.context = assemble_raf_query(s, noisy, c, h);
    req.horizon = h;
    req.num_samples = config.num_model_samples;
    req.designated_future = std::vector<double>(noisy.begin() + static_cast<std::ptrdiff_t>(c), noisy.end());

    const auto mean_traj = mean_forecast(forecaster.forecast(req));
    r.score = scaled_mse(mean_traj, std::span<const double>(s).subspan(c, h));
    return r;
}

} // namespace

std::vector<SweepPoint> snr_sweep(const SynthConfig& config, Forecaster& forecaster, std::span<const double> snr_grid,
                                  bool parallel)
{
    config.validate();
    for (double snr : snr_grid) {
        if (!(snr > 0.0) || !std::isfinite(snr)) {
            throw Error(ErrorCode::InvalidArgument, "SNR grid values must be positive and finite");
        }
    }
    const std::size_t n_inst = config.num_instances;
    const std::size_t pairs = snr_grid.size() * n_inst;
    std::vector<PairResult> results(pairs);
    const bool run_parallel = parallel && forecaster.thread_safe();

#pragma omp parallel for schedule(dynamic) if (run_parallel)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pairs); ++p) {
        const auto idx = static_cast<std::size_t>(p);
        const std::size_t k = idx / n_inst;
        const std::size_t i = idx % n_inst;
        try {
            results[idx] = run_pair(config, forecaster, snr_grid[k], i, k);
        } catch (const std::exception& e) {
            results[idx].error = e.what();
        }
    }

    std::vector<SweepPoint> points;
    points.reserve(snr_grid.size());
    for (std::size_t k = 0; k < snr_grid.size(); ++k) {
        SweepPoint pt;
        pt.snr = snr_grid[k];
        pt.num_instances = n_inst;
        double sigma_sum = 0.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < n_inst; ++i) {
            const auto& r = results[k * n_inst + i];
            if (!r.error.empty()) {
                throw Error(ErrorCode::ForecasterFailed, "sweep failed at snr=" + format_real(pt.snr) + " (instance " +
                                                         std::to_string(i) + "): " + r.error);
            }
            sigma_sum += r.sigma;
            sum += r.score;
            pt.per_instance.push_back(r.score);
        }
        const auto n = static_cast<double>(n_inst);
        pt.mean_sigma = sigma_sum / n;
        pt.mean_scaled_mse = sum / n;
        if (n_inst > 1) {
            double ss = 0.0;
            for (double v : pt.per_instance) {
                ss += (v - pt.mean_scaled_mse) * (v - pt.mean_scaled_mse);
            }
            pt.stderr_scaled_mse = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
        points.push_back(std::move(pt));
    }
    return points;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points)
{
    out << "snr,sigma,mean_scaled_mse,stderr,num_instances\n";
    for (const auto& p : points) {
        out << format_real(p.snr) << ',' << format_real(p.mean_sigma) << ',' << format_real(p.mean_scaled_mse) << ','
            << format_real(p.stderr_scaled_mse) << ',' << p.num_instances << '\n';
    }
}

} // namespace raf
