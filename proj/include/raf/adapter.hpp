#pragma once

// Host side of the external forecaster protocol (v1): newline-delimited JSON
// frames over the child's stdin/stdout, one request then one response.
//
//   {"type":"hello","v":1}
//     -> {"type":"hello","v":1,"capabilities":["forecast","embed"],"embed_dim":N}
//   {"type":"forecast","context":[...],"h":H,"num_samples":S}
//     -> {"type":"samples","samples":[[...] x S]}
//   {"type":"embed","series":[...]} -> {"type":"embedding","embedding":[...]}
//   {"type":"error","message":"..."} from either side aborts the exchange.

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raf/forecaster.hpp"
#include "raf/retrieval.hpp"

namespace raf {

inline constexpr int kProtocolVersion = 1;

struct AdapterOptions {
    std::string command;  // run through /bin/sh -c
    std::chrono::milliseconds timeout{120'000};
};

/// One child process with strictly alternating frames. A timeout or EOF
/// kills the connection; later exchanges raise AdapterUnavailable.
class AdapterProcess {
public:
    explicit AdapterProcess(AdapterOptions options);
    ~AdapterProcess();
    AdapterProcess(const AdapterProcess&) = delete;
    AdapterProcess& operator=(const AdapterProcess&) = delete;

    /// Sends one frame (a newline is appended) and returns the next response line.
    std::string exchange(const std::string& frame);
    bool alive() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class AdapterForecaster final : public Forecaster, public Embedder {
public:
    explicit AdapterForecaster(AdapterOptions options);

    const std::vector<std::string>& capabilities() const noexcept { return capabilities_; }
    bool can_embed() const noexcept;
    std::optional<std::size_t> embed_dim() const noexcept { return embed_dim_; }

    /// External encoder vector. CapabilityMissing when the handshake did not
    /// advertise "embed"; MalformedResponse when the dimension drifts.
    std::vector<double> embed(std::span<const double> series) override;

    std::string name() const override { return "adapter"; }
    bool thread_safe() const override { return false; }

protected:
    ForecastSamples do_forecast(const ForecastRequest& request) override;

private:
    AdapterProcess process_;
    std::vector<std::string> capabilities_;
    std::optional<std::size_t> embed_dim_;
};

/// Adapter command from the flag, else the RAF_ADAPTER environment variable.
std::optional<std::string> resolve_adapter_command(const std::optional<std::string>& flag);

} // namespace raf
