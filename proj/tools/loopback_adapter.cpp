// Loopback adapter for protocol tests. Forecast sample i, step j echoes
// context[(i + j) % len]; embed echoes the series back. Flags inject faults.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct Faults {
    bool embed = true;
    long embed_dim = -1;
    bool drift = false;
    long crash_after = -1;
    long garbage_after = -1;
    bool bad_shape = false;
    bool hang = false;
    bool error = false;
    int version = 1;
};

Faults parse_args(int argc, char** argv)
{
    Faults f;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        auto next = [&]() { return i + 1 < argc ? std::atol(argv[++i]) : 0L; };
        if (a == "--no-embed") f.embed = false;
        else if (a == "--embed-dim") f.embed_dim = next();
        else if (a == "--drift") f.drift = true;
        else if (a == "--crash-after") f.crash_after = next();
        else if (a == "--garbage-after") f.garbage_after = next();
        else if (a == "--bad-shape") f.bad_shape = true;
        else if (a == "--hang") f.hang = true;
        else if (a == "--error") f.error = true;
        else if (a == "--version") f.version = static_cast<int>(next());
    }
    return f;
}

} // namespace

int main(int argc, char** argv)
{
    const Faults faults = parse_args(argc, argv);
    std::ios::sync_with_stdio(false);
    std::string line;
    long handled = 0;
    long embeds = 0;
    while (std::getline(std::cin, line)) {
        if (faults.crash_after >= 0 && handled >= faults.crash_after) {
            return 3;
        }
        if (faults.garbage_after >= 0 && handled >= faults.garbage_after) {
            std::cout << "this is not json" << std::endl;
            ++handled;
            continue;
        }
        ++handled;
        json out;
        try {
            const json in = json::parse(line);
            const std::string type = in.at("type").get<std::string>();
            if (type == "hello") {
                out = {{"type", "hello"}, {"v", faults.version}};
                out["capabilities"] = faults.embed ? json::array({"forecast", "embed"}) : json::array({"forecast"});
                if (faults.embed_dim > 0) {
                    out["embed_dim"] = faults.embed_dim;
                }
            } else if (faults.hang) {
                std::this_thread::sleep_for(std::chrono::hours(1));
            } else if (faults.error) {
                out = {{"type", "error"}, {"message", "injected failure"}};
            } else if (type == "forecast") {
                const auto ctx = in.at("context").get<std::vector<double>>();
                const auto h = in.at("h").get<std::size_t>();
                const auto n = in.at("num_samples").get<std::size_t>();
                json samples = json::array();
                for (std::size_t i = 0; i < n; ++i) {
                    json row = json::array();
                    const std::size_t len = faults.bad_shape && i == 0 ? h + 1 : h;
                    for (std::size_t j = 0; j < len; ++j) {
                        row.push_back(ctx[(i + j) % ctx.size()]);
                    }
                    samples.push_back(std::move(row));
                }
                out = {{"type", "samples"}, {"samples", std::move(samples)}};
            } else if (type == "embed") {
                auto series = in.at("series").get<std::vector<double>>();
                if (faults.drift && embeds > 0) {
                    series.push_back(0.0);
                }
                ++embeds;
                out = {{"type", "embedding"}, {"embedding", series}};
            } else {
                out = {{"type", "error"}, {"message", "unknown frame type " + type}};
            }
        } catch (const std::exception& e) {
            out = {{"type", "error"}, {"message", e.what()}};
        }
        std::cout << out.dump() << '\n' << std::flush;
    }
    return 0;
}
