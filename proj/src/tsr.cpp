#include "raf/tsr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "raf/error.hpp"
#include "raf/series.hpp"

namespace raf {

std::vector<double> softmax(std::span<const double> scores)
{
    std::vector<double> out(scores.size());
    if (scores.empty()) {
        return out;
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - top);
        sum += out[i];
    }
    for (auto& v : out) {
        v /= sum;
    }
    return out;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& scores)
{
    const auto probs = softmax(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
    return Eigen::Map<const Eigen::VectorXd>(probs.data(), scores.size());
}

double positional_gap(std::size_t planes, std::size_t period)
{
    double gap = 2.0;
    for (std::size_t d = 1; d < period; ++d) {
        double mean_cos = 0.0;
        for (std::size_t m = 1; m <= planes; ++m) {
            mean_cos += std::cos(2.0 * std::numbers::pi * static_cast<double>(m * d) / static_cast<double>(period));
        }
        gap = std::min(gap, 1.0 - mean_cos / static_cast<double>(planes));
    }
    return gap;
}

PosEncoding make_positional_encodings(std::size_t num_tokens, std::size_t shift, std::size_t planes)
{
    if (num_tokens == 0) {
        throw Error(ErrorCode::InvalidArgument, "positional encodings need at least one token");
    }
    const std::size_t period = num_tokens + shift + 1;
    if (planes == 0) {
        const std::size_t max_planes = std::max<std::size_t>(1, (period - 1) / 2);
        planes = 1;
        while (planes < max_planes && positional_gap(planes, period) < kMinPositionalGap) {
            ++planes;
        }
    }
    PosEncoding pe;
    pe.planes = planes;
    pe.shift = shift;
    pe.theta = 2.0 * std::numbers::pi / static_cast<double>(period);
    pe.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_tokens), static_cast<Eigen::Index>(2 * planes));
    pe.rotation = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * planes), static_cast<Eigen::Index>(2 * planes));
    const double amp = 1.0 / std::sqrt(static_cast<double>(planes));
    for (std::size_t m = 0; m < planes; ++m) {
        const double freq = static_cast<double>(m + 1) * pe.theta;
        const auto c = static_cast<Eigen::Index>(2 * m);
        for (std::size_t i = 0; i < num_tokens; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            pe.vectors(r, c) = amp * std::cos(freq * static_cast<double>(i));
            pe.vectors(r, c + 1) = amp * std::sin(freq * static_cast<double>(i));
        }
        const double a = freq * static_cast<double>(shift);
        pe.rotation(c, c) = std::cos(a);
        pe.rotation(c, c + 1) = -std::sin(a);
        pe.rotation(c + 1, c) = std::sin(a);
        pe.rotation(c + 1, c + 1) = std::cos(a);
    }
    return pe;
}

TsrModel build_tsr_model(std::span<const double> series, std::size_t window_len, double scale)
{
    if (window_len == 0) {
        throw Error(ErrorCode::InvalidArgument, "window length must be at least 1");
    }
    if (window_len > series.size() / 2) {
        throw Error(ErrorCode::WindowTooLong, "window length " + std::to_string(window_len) +
                                                  " leaves no room for a match and its future in a series of length " +
                                                  std::to_string(series.size()));
    }
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw Error(ErrorCode::InvalidArgument, "saturation scale must be finite and non-negative");
    }
    if (!all_finite(series)) {
        throw Error(ErrorCode::NonFiniteInput, "series contains missing or non-finite values");
    }
    const auto patches = extract_patches(series, window_len);
    const std::size_t n = patches.patches.size();
    if (n < 2) {
        throw Error(ErrorCode::NoTokens, "need at least one history token besides the query");
    }

    TsrModel model;
    model.window_len = window_len;
    model.scale = scale;
    model.positions = make_positional_encodings(n, window_len);

    const auto tok = static_cast<Eigen::Index>(window_len + 1);
    const auto pos = static_cast<Eigen::Index>(model.positions.dim());
    const auto rows = static_cast<Eigen::Index>(n);
    model.tokens = Eigen::MatrixXd::Zero(rows, tok + pos);
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = embed_patch(patches.patches[i].values);
        const auto r = static_cast<Eigen::Index>(i);
        for (std::size_t k = 0; k < window_len; ++k) {
            model.tokens(r, static_cast<Eigen::Index>(k)) = t.direction[k];
        }
        model.tokens(r, tok - 1) = t.norm;
        model.tokens.row(r).tail(pos) = model.positions.vectors.row(r);
    }
    model.truncated = model.tokens.topRows(rows - 1);

    model.row_normalizer = Eigen::VectorXd::Zero(rows - 1);
    for (Eigen::Index r = 0; r < rows - 1; ++r) {
        const double norm = model.truncated.row(r).head(tok).norm();
        model.row_normalizer(r) = norm > 0.0 ? 1.0 / norm : 0.0;
    }

    const Eigen::Index dim = tok + pos;
    model.token_projection = Eigen::MatrixXd::Zero(dim, dim);
    model.token_projection.topLeftCorner(tok, tok).setIdentity();
    model.positional_projection = Eigen::MatrixXd::Identity(dim, dim) - model.token_projection;
    model.rotation = Eigen::MatrixXd::Identity(dim, dim);
    model.rotation.bottomRightCorner(pos, pos) = model.positions.rotation;
    return model;
}

Eigen::VectorXd TsrModel::query() const
{
    const auto tok = static_cast<Eigen::Index>(token_dim());
    Eigen::VectorXd q = Eigen::VectorXd::Zero(tokens.cols());
    q.head(tok) = tokens.row(tokens.rows() - 1).head(tok).transpose();
    const double norm = q.norm();
    if (tokens(tokens.rows() - 1, tok - 1) < kZeroNorm) {
        throw Error(ErrorCode::ZeroNormQuery, "the final motif is all zeros and has no direction");
    }
    return q / norm;
}

TsrTrace run_tsr(const TsrModel& model)
{
    TsrTrace trace;
    const Eigen::VectorXd q = model.query();

    const Eigen::VectorXd scores1 =
        model.row_normalizer.asDiagonal() * (model.truncated * (model.layer1_weights() * q));
    trace.attention1 = softmax(scores1);
    trace.hidden = model.truncated.transpose() * trace.attention1;

    const Eigen::VectorXd scores2 = model.truncated * (model.layer2_weights() * trace.hidden);
    trace.attention2 = softmax(scores2);
    trace.output = model.truncated.transpose() * trace.attention2;

    EmbeddedToken token;
    token.direction.resize(model.window_len);
    for (std::size_t k = 0; k < model.window_len; ++k) {
        token.direction[k] = trace.output(static_cast<Eigen::Index>(k));
    }
    token.norm = trace.output(static_cast<Eigen::Index>(model.window_len));
    trace.prediction = decode_embedding(token);
    return trace;
}

std::vector<double> solve_tsr(std::span<const double> series, std::size_t window_len, double scale,
                              std::size_t horizon)
{
    if (horizon > window_len) {
        throw Error(ErrorCode::InvalidArgument, "horizon cannot exceed the window length");
    }
    auto prediction = run_tsr(build_tsr_model(series, window_len, scale)).prediction;
    if (horizon != 0) {
        prediction.resize(horizon);
    }
    return prediction;
}

} // namespace raf
