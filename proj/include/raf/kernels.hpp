#pragma once

// Distance-scan kernels behind retrieval. Each parallel kernel has a serial
// reference with the same per-entry arithmetic, so results are bit-identical.

#include <cstddef>
#include <span>
#include <vector>

namespace raf::kernels {

struct Candidate {
    double distance;
    std::size_t entry;
};

/// Lexicographic (distance, entry) order; entry index breaks ties.
inline bool candidate_less(const Candidate& a, const Candidate& b) noexcept
{
    return a.distance < b.distance || (a.distance == b.distance && a.entry < b.entry);
}

/// Squared L2 distance, summed left to right.
double squared_l2(std::span<const double> a, std::span<const double> b) noexcept;

/// Serial reference: every distance, stable-sorted, first n kept.
/// `embeddings` is row-major, `count` rows of `query.size()` columns.
std::vector<Candidate> top_n_serial(std::span<const double> query, std::span<const double> embeddings,
                                    std::size_t count, std::size_t n);

/// OpenMP partitioned scan: per-thread partial top-n, merged by candidate_less.
std::vector<Candidate> top_n_parallel(std::span<const double> query, std::span<const double> embeddings,
                                      std::size_t count, std::size_t n);

/// Many queries (row-major, `num_queries` x dim), parallel across queries, serial scan each.
std::vector<std::vector<Candidate>> top_n_batch(std::span<const double> queries, std::size_t num_queries,
                                                std::span<const double> embeddings, std::size_t count,
                                                std::size_t n);

} // namespace raf::kernels
