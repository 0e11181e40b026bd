#include "raf/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace raf::kernels {

double squared_l2(std::span<const double> a, std::span<const double> b) noexcept
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

namespace {

Candidate score(std::span<const double> query, std::span<const double> embeddings, std::size_t entry)
{
    const std::size_t dim = query.size();
    return {std::sqrt(squared_l2(query, embeddings.subspan(entry * dim, dim))), entry};
}

void keep_best(std::vector<Candidate>& c, std::size_t n)
{
    if (c.size() > n) {
        std::partial_sort(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n), c.end(), candidate_less);
        c.resize(n);
    } else {
        std::sort(c.begin(), c.end(), candidate_less);
    }
}

} // namespace

std::vector<Candidate> top_n_serial(std::span<const double> query, std::span<const double> embeddings,
                                    std::size_t count, std::size_t n)
{
    std::vector<Candidate> all;
    all.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        all.push_back(score(query, embeddings, i));
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
    all.resize(std::min(n, count));
    return all;
}

std::vector<Candidate> top_n_parallel(std::span<const double> query, std::span<const double> embeddings,
                                      std::size_t count, std::size_t n)
{
    const int threads = omp_get_max_threads();
    std::vector<std::vector<Candidate>> partial(static_cast<std::size_t>(threads));

#pragma omp parallel num_threads(threads)
    {
        const auto tid = static_cast<std::size_t>(omp_get_thread_num());
        auto& local = partial[tid];
        local.reserve(2 * n + 1);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            local.push_back(score(query, embeddings, static_cast<std::size_t>(i)));
            if (local.size() >= 2 * n + 1) {
                keep_best(local, n);
            }
        }
        keep_best(local, n);
    }

    std::vector<Candidate> merged;
    for (const auto& p : partial) {
        merged.insert(merged.end(), p.begin(), p.end());
    }
    keep_best(merged, n);
    return merged;
}

std::vector<std::vector<Candidate>> top_n_batch(std::span<const double> queries, std::size_t num_queries,
                                                std::span<const double> embeddings, std::size_t count,
                                                std::size_t n)
{
    std::vector<std::vector<Candidate>> out(num_queries);
    if (num_queries == 0) {
        return out;
    }
    const std::size_t dim = queries.size() / num_queries;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(num_queries); ++q) {
        const auto qi = static_cast<std::size_t>(q);
        out[qi] = top_n_serial(queries.subspan(qi * dim, dim), embeddings, count, n);
    }
    return out;
}

} // namespace raf::kernels
