#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "raf/bench.hpp"
#include "raf/error.hpp"

namespace raf {

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

const std::string kMetrics[] = {"wql", "mase"};

std::optional<double> metric_of(const EvalRecord& r, const std::string& metric)
{
    if (r.failed) {
        return std::nullopt;
    }
    if (metric == "wql") {
        return r.wql;
    }
    return r.mase;
}

// Geometric mean over the strictly positive values; the rest are reported.
std::optional<double> positive_geomean(const std::vector<std::pair<std::string, double>>& items,
                                       const std::string& what, std::vector<std::string>& notes)
{
    std::vector<double> kept;
    for (const auto& [label, v] : items) {
        if (v > 0.0 && std::isfinite(v)) {
            kept.push_back(v);
        } else {
            notes.push_back(what + ": skipped non-positive ratio " + format_real(v) + " for " + label);
        }
    }
    if (kept.empty()) {
        return std::nullopt;
    }
    return geometric_mean(kept);
}

} // namespace

std::optional<double> AggregateReport::find(const std::string& level, const std::string& metric,
                                            const std::string& dataset, std::optional<std::size_t> context_len,
                                            const std::string& method, const std::string& benchmark) const
{
    for (const auto& r : rows) {
        if (r.level == level && r.metric == metric && r.dataset == dataset && r.context_len == context_len &&
            r.method == method && r.benchmark == benchmark) {
            return r.value;
        }
    }
    return std::nullopt;
}

AggregateReport aggregate(const ResultsTable& table)
{
    AggregateReport report;
    auto benchmark_of = [&](const std::string& ds) {
        auto it = table.benchmark_of.find(ds);
        return it == table.benchmark_of.end() ? std::string("default") : it->second;
    };

    // (dataset, C, method) -> records over H, in first-seen order.
    using Key = std::tuple<std::string, std::size_t, Method>;
    std::vector<Key> order;
    std::map<Key, std::vector<const EvalRecord*>> groups;
    std::set<std::tuple<std::string, std::size_t, std::size_t>> baseline_cells;
    bool any_baseline = false;
    for (const auto& r : table.records) {
        Key k{r.dataset, r.context_len, r.method};
        if (!groups.count(k)) {
            order.push_back(k);
        }
        groups[k].push_back(&r);
        if (r.method == Method::Baseline) {
            any_baseline = true;
            baseline_cells.insert({r.dataset, r.context_len, r.horizon});
        }
    }

    std::map<std::tuple<std::string, std::size_t, Method, std::string>, double> means;
    for (const auto& k : order) {
        const auto& [ds, c, method] = k;
        for (const auto& metric : kMetrics) {
            double sum = 0.0;
            std::size_t missing = 0;
            for (const auto* r : groups[k]) {
                if (auto v = metric_of(*r, metric)) {
                    sum += *v;
                } else {
                    ++missing;
                }
            }
            const auto label = ds + " C=" + std::to_string(c) + " " + to_string(method);
            if (missing > 0) {
                report.notes.push_back("no " + metric + " mean for " + label + ": " + std::to_string(missing) +
                                       " horizon cell(s) without a value");
                continue;
            }
            const double mean = sum / static_cast<double>(groups[k].size());
            means[{ds, c, method, metric}] = mean;
            report.rows.push_back({"mean", benchmark_of(ds), ds, to_string(method), c, metric, mean});
        }
    }

    if (!any_baseline) {
        report.notes.push_back("no baseline cells; relative scores skipped");
        return report;
    }
    for (const auto& r : table.records) {
        if (r.method == Method::Raf && !baseline_cells.count({r.dataset, r.context_len, r.horizon})) {
            throw Error(ErrorCode::MissingBaselineCell, "no baseline cell for " + r.dataset + " C=" +
                                                            std::to_string(r.context_len) +
                                                            " H=" + std::to_string(r.horizon));
        }
    }

    // Relative scores per (dataset, C), then geometric means upward.
    std::vector<std::string> dataset_order;
    std::map<std::string, std::vector<std::size_t>> contexts;
    for (const auto& [ds, c, method] : order) {
        if (method != Method::Raf) {
            continue;
        }
        if (!contexts.count(ds)) {
            dataset_order.push_back(ds);
        }
        contexts[ds].push_back(c);
    }

    for (const auto& metric : kMetrics) {
        std::vector<std::string> bench_order;
        std::map<std::string, std::vector<std::pair<std::string, double>>> per_benchmark;
        for (const auto& ds : dataset_order) {
            std::vector<std::pair<std::string, double>> ratios;
            for (auto c : contexts[ds]) {
                auto raf = means.find({ds, c, Method::Raf, metric});
                auto base = means.find({ds, c, Method::Baseline, metric});
                if (raf == means.end() || base == means.end()) {
                    continue;
                }
                try {
                    const double rel = relative_score(raf->second, base->second);
                    ratios.emplace_back(ds + " C=" + std::to_string(c), rel);
                    report.rows.push_back({"relative", benchmark_of(ds), ds, "", c, metric, rel});
                } catch (const Error& e) {
                    report.notes.push_back(metric + " relative score for " + ds + " C=" + std::to_string(c) +
                                           " skipped: " + e.what());
                }
            }
            if (auto g = positive_geomean(ratios, metric + " dataset " + ds, report.notes)) {
                const auto bm = benchmark_of(ds);
                report.rows.push_back({"dataset", bm, ds, "", std::nullopt, metric, *g});
                if (!per_benchmark.count(bm)) {
                    bench_order.push_back(bm);
                }
                per_benchmark[bm].emplace_back(ds, *g);
            }
        }
        std::vector<std::pair<std::string, double>> bench_scores;
        for (const auto& bm : bench_order) {
            if (auto g = positive_geomean(per_benchmark[bm], metric + " benchmark " + bm, report.notes)) {
                report.rows.push_back({"benchmark", bm, "", "", std::nullopt, metric, *g});
                bench_scores.emplace_back(bm, *g);
            }
        }
        if (auto g = positive_geomean(bench_scores, metric + " overall", report.notes)) {
            report.rows.push_back({"overall", "", "", "", std::nullopt, metric, *g});
        }
    }
    return report;
}

void write_cells_csv(std::ostream& out, const ResultsTable& table)
{
    write_eval_csv(out, table.records);
}

void write_failures_csv(std::ostream& out, const ResultsTable& table)
{
    out << "dataset,method,C,H,reason\n";
    for (const auto& r : table.records) {
        if (r.failed) {
            out << csv_field(r.dataset) << ',' << to_string(r.method) << ',' << r.context_len << ',' << r.horizon
                << ',' << csv_field(r.failure) << '\n';
        }
    }
}

void write_counts_csv(std::ostream& out, const ResultsTable& table)
{
    out << "dataset,C,H,database,validation,evaluated,skipped\n";
    for (const auto& c : table.counts) {
        out << csv_field(c.dataset) << ',' << c.context_len << ',' << c.horizon << ',' << c.database << ','
            << c.validation << ',' << c.evaluated << ',' << c.skipped << '\n';
    }
}

void write_aggregate_csv(std::ostream& out, const AggregateReport& report)
{
    out << "level,benchmark,dataset,method,C,metric,value\n";
    for (const auto& r : report.rows) {
        out << r.level << ',' << csv_field(r.benchmark) << ',' << csv_field(r.dataset) << ',' << r.method << ',';
        if (r.context_len) {
            out << *r.context_len;
        }
        out << ',' << r.metric << ',' << format_real(r.value) << '\n';
    }
}

void write_summary(std::ostream& out, const ResultsTable& table, const AggregateReport& report)
{
    std::size_t failed = 0;
    for (const auto& r : table.records) {
        failed += r.failed ? 1 : 0;
    }
    out << "cells: " << table.records.size() << " (" << failed << " failed)\n";
    for (const auto& metric : kMetrics) {
        if (auto v = report.find("overall", metric)) {
            out << "overall relative " << metric << ": " << format_real(*v) << '\n';
        }
    }
    for (const auto& r : report.rows) {
        if (r.level == "benchmark") {
            out << "benchmark " << r.benchmark << " relative " << r.metric << ": " << format_real(r.value) << '\n';
        }
    }
    for (const auto& note : table.notes) {
        out << "note: " << note << '\n';
    }
    for (const auto& note : report.notes) {
        out << "note: " << note << '\n';
    }
}

void write_bench_outputs(const std::filesystem::path& dir, const ResultsTable& table, const AggregateReport& report)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    }
    auto write = [&](const char* name, auto&& fn) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
        }
        fn(out);
        if (!out) {
            throw Error(ErrorCode::IoError, "write failed for " + (dir / name).string());
        }
    };
    write("cells.csv", [&](std::ostream& o) { write_cells_csv(o, table); });
    write("failures.csv", [&](std::ostream& o) { write_failures_csv(o, table); });
    write("counts.csv", [&](std::ostream& o) { write_counts_csv(o, table); });
    write("aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, report); });
    write("summary.txt", [&](std::ostream& o) { write_summary(o, table, report); });
}

} // namespace raf
