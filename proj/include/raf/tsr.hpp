#pragma once

// Two-layer attention that solves time-series retrieval in the saturation
// limit: layer 1 attends from the final motif to its exact earlier match using
// the [direction; norm] token block, layer 2 rotates the match's positional
// encoding C steps forward and attends to the window that followed it.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace raf {

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> scores);
Eigen::VectorXd softmax(const Eigen::VectorXd& scores);

/// Unit positional vectors built from `planes` stacked 2-D rotations with
/// frequencies m * theta (m = 1..planes), each plane scaled by 1/sqrt(planes).
/// The rotation by shift*theta per plane maps p_i to p_{i+shift}.
struct PosEncoding {
    std::size_t planes = 1;
    std::size_t shift = 1;
    double theta = 0.0;
    Eigen::MatrixXd vectors;   // num_tokens x (2 * planes), row i is p_i
    Eigen::MatrixXd rotation;  // (2 * planes) x (2 * planes), orthogonal

    std::size_t dim() const noexcept { return 2 * planes; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(vectors.rows()); }
};

/// Smallest separation 1 - p_i . p_{i+d} over d != 0 (mod period).
double positional_gap(std::size_t planes, std::size_t period);

/// theta = 2*pi / (num_tokens + shift + 1). With planes = 0 the plane count is the
/// smallest one whose positional_gap reaches kMinPositionalGap.
PosEncoding make_positional_encodings(std::size_t num_tokens, std::size_t shift, std::size_t planes = 0);

inline constexpr double kMinPositionalGap = 1e-2;

struct TsrModel {
    std::size_t window_len = 0;
    double scale = 0.0;                     // saturation constant c
    PosEncoding positions;
    Eigen::MatrixXd tokens;                 // X: one row per stride-1 patch, [dir, norm, p_i]
    Eigen::MatrixXd truncated;              // X_tr: X without its final (query) row
    Eigen::VectorXd row_normalizer;         // diagonal of N: unit token block per X_tr row
    Eigen::MatrixXd token_projection;       // Phi
    Eigen::MatrixXd positional_projection;  // I - Phi
    Eigen::MatrixXd rotation;               // identity on the token block, positions.rotation after it

    std::size_t token_dim() const noexcept { return window_len + 1; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(tokens.cols()); }
    std::size_t num_tokens() const noexcept { return static_cast<std::size_t>(tokens.rows()); }

    /// Embedded final motif with a zero positional block, scaled to unit length.
    Eigen::VectorXd query() const;
    Eigen::MatrixXd layer1_weights() const { return scale * token_projection; }
    Eigen::MatrixXd layer2_weights() const { return scale * positional_projection * rotation * positional_projection; }
};

TsrModel build_tsr_model(std::span<const double> series, std::size_t window_len, double scale);

struct TsrTrace {
    Eigen::VectorXd attention1;  // over X_tr rows
    Eigen::VectorXd hidden;      // layer 1 output
    Eigen::VectorXd attention2;
    Eigen::VectorXd output;      // layer 2 output
    std::vector<double> prediction;  // decoded token block, length C
};

TsrTrace run_tsr(const TsrModel& model);

/// Predicted continuation of the final motif. horizon = 0 means C; smaller
/// horizons trim the decoded window.
std::vector<double> solve_tsr(std::span<const double> series, std::size_t window_len, double scale,
                              std::size_t horizon = 0);

} // namespace raf
