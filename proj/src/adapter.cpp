#include "raf/adapter.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <thread>

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "raf/error.hpp"

namespace raf {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct AdapterProcess::Impl {
    AdapterOptions options;
    int fd = -1;
    pid_t pid = -1;
    std::string buffer;

    void shutdown()
    {
        if (fd >= 0) {
            ::close(fd);
            fd = -1;
        }
        if (pid > 0) {
            int status = 0;
            for (int i = 0; i < 20; ++i) {
                if (::waitpid(pid, &status, WNOHANG) == pid) {
                    ::kill(-pid, SIGKILL);
                    pid = -1;
                    return;
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(10));
            }
            ::kill(-pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            pid = -1;
        }
    }

    [[noreturn]] void fail(const std::string& why)
    {
        shutdown();
        throw Error(ErrorCode::AdapterUnavailable, "adapter '" + options.command + "': " + why);
    }

    int remaining_ms(Clock::time_point deadline) const
    {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        return static_cast<int>(std::max<long long>(0, left));
    }

    void write_all(const std::string& data, Clock::time_point deadline)
    {
        std::size_t sent = 0;
        while (sent < data.size()) {
            pollfd p{fd, POLLOUT, 0};
            const int ready = ::poll(&p, 1, remaining_ms(deadline));
            if (ready == 0) {
                fail("timed out writing a request");
            }
            if (ready < 0) {
                if (errno == EINTR) {
                    continue;
                }
                fail(std::string("poll failed: ") + std::strerror(errno));
            }
            const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR || errno == EAGAIN) {
                    continue;
                }
                fail(std::string("write failed: ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    std::string read_line(Clock::time_point deadline)
    {
        for (;;) {
            const auto nl = buffer.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                return line;
            }
            pollfd p{fd, POLLIN, 0};
            const int ready = ::poll(&p, 1, remaining_ms(deadline));
            if (ready == 0) {
                fail("no response within " + std::to_string(options.timeout.count()) + " ms");
            }
            if (ready < 0) {
                if (errno == EINTR) {
                    continue;
                }
                fail(std::string("poll failed: ") + std::strerror(errno));
            }
            char chunk[65536];
            const ssize_t n = ::read(fd, chunk, sizeof(chunk));
            if (n == 0) {
                fail("process closed its output");
            }
            if (n < 0) {
                if (errno == EINTR || errno == EAGAIN) {
                    continue;
                }
                fail(std::string("read failed: ") + std::strerror(errno));
            }
            buffer.append(chunk, static_cast<std::size_t>(n));
        }
    }
};

AdapterProcess::AdapterProcess(AdapterOptions options) : impl_(std::make_unique<Impl>())
{
    impl_->options = std::move(options);
    if (impl_->options.command.empty()) {
        throw Error(ErrorCode::InvalidArgument, "adapter command is empty");
    }
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
        throw Error(ErrorCode::AdapterUnavailable, std::string("socketpair failed: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(sv[0]);
        ::close(sv[1]);
        throw Error(ErrorCode::AdapterUnavailable, std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        // Own process group, so shutdown reaches whatever the shell spawns.
        ::setpgid(0, 0);
        ::dup2(sv[1], STDIN_FILENO);
        ::dup2(sv[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", impl_->options.command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(sv[1]);
    impl_->fd = sv[0];
    impl_->pid = pid;
}

AdapterProcess::~AdapterProcess()
{
    impl_->shutdown();
}

bool AdapterProcess::alive() const noexcept
{
    return impl_->fd >= 0;
}

std::string AdapterProcess::exchange(const std::string& frame)
{
    if (impl_->fd < 0) {
        throw Error(ErrorCode::AdapterUnavailable, "adapter '" + impl_->options.command + "' is no longer running");
    }
    const auto deadline = Clock::now() + impl_->options.timeout;
    impl_->write_all(frame + "\n", deadline);
    return impl_->read_line(deadline);
}

namespace {

json parse_frame(const std::string& line)
{
    json frame;
    try {
        frame = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedResponse, std::string("response is not JSON: ") + e.what());
    }
    if (!frame.is_object() || !frame.contains("type") || !frame["type"].is_string()) {
        throw Error(ErrorCode::MalformedResponse, "response frame has no string 'type'");
    }
    if (frame["type"] == "error") {
        const auto msg = frame.contains("message") && frame["message"].is_string()
                             ? frame["message"].get<std::string>()
                             : std::string("(no message)");
        throw Error(ErrorCode::AdapterError, "adapter reported: " + msg);
    }
    return frame;
}

void expect_type(const json& frame, const char* type)
{
    if (frame["type"] != type) {
        throw Error(ErrorCode::MalformedResponse, "expected a '" + std::string(type) + "' frame, got '" +
                                                      frame["type"].get<std::string>() + "'");
    }
}

std::vector<double> real_array(const json& value, const char* what)
{
    if (!value.is_array()) {
        throw Error(ErrorCode::MalformedResponse, std::string(what) + " is not an array");
    }
    std::vector<double> out;
    out.reserve(value.size());
    for (const auto& v : value) {
        if (!v.is_number()) {
            throw Error(ErrorCode::MalformedResponse, std::string(what) + " holds a non-number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw Error(ErrorCode::MalformedResponse, std::string(what) + " holds a non-finite number");
        }
        out.push_back(d);
    }
    return out;
}

} // namespace

AdapterForecaster::AdapterForecaster(AdapterOptions options) : process_(std::move(options))
{
    const auto frame = parse_frame(process_.exchange(json{{"type", "hello"}, {"v", kProtocolVersion}}.dump()));
    expect_type(frame, "hello");
    if (!frame.contains("v") || !frame["v"].is_number_integer() || frame["v"].get<int>() != kProtocolVersion) {
        throw Error(ErrorCode::MalformedResponse, "adapter does not speak protocol v1");
    }
    if (!frame.contains("capabilities") || !frame["capabilities"].is_array()) {
        throw Error(ErrorCode::MalformedResponse, "handshake lacks a capabilities array");
    }
    for (const auto& c : frame["capabilities"]) {
        if (!c.is_string()) {
            throw Error(ErrorCode::MalformedResponse, "capability entries must be strings");
        }
        capabilities_.push_back(c.get<std::string>());
    }
    if (frame.contains("embed_dim") && !frame["embed_dim"].is_null()) {
        if (!frame["embed_dim"].is_number_unsigned() || frame["embed_dim"].get<std::size_t>() == 0) {
            throw Error(ErrorCode::MalformedResponse, "embed_dim must be a positive integer");
        }
        embed_dim_ = frame["embed_dim"].get<std::size_t>();
    }
}

bool AdapterForecaster::can_embed() const noexcept
{
    return std::find(capabilities_.begin(), capabilities_.end(), "embed") != capabilities_.end();
}

std::vector<double> AdapterForecaster::embed(std::span<const double> series)
{
    if (!can_embed()) {
        throw Error(ErrorCode::CapabilityMissing, "adapter does not advertise 'embed'");
    }
    const json request{{"type", "embed"}, {"series", std::vector<double>(series.begin(), series.end())}};
    const auto frame = parse_frame(process_.exchange(request.dump()));
    expect_type(frame, "embedding");
    if (!frame.contains("embedding")) {
        throw Error(ErrorCode::MalformedResponse, "embedding frame lacks 'embedding'");
    }
    auto vec = real_array(frame["embedding"], "embedding");
    if (vec.empty()) {
        throw Error(ErrorCode::MalformedResponse, "embedding is empty");
    }
    if (!embed_dim_) {
        embed_dim_ = vec.size();
    } else if (*embed_dim_ != vec.size()) {
        throw Error(ErrorCode::MalformedResponse, "embedding dimension changed from " + std::to_string(*embed_dim_) +
                                                      " to " + std::to_string(vec.size()));
    }
    return vec;
}

ForecastSamples AdapterForecaster::do_forecast(const ForecastRequest& request)
{
    if (std::find(capabilities_.begin(), capabilities_.end(), "forecast") == capabilities_.end()) {
        throw Error(ErrorCode::CapabilityMissing, "adapter does not advertise 'forecast'");
    }
    const json frame_out{{"type", "forecast"},
                         {"context", request.context},
                         {"h", request.horizon},
                         {"num_samples", request.num_samples}};
    const auto frame = parse_frame(process_.exchange(frame_out.dump()));
    expect_type(frame, "samples");
    if (!frame.contains("samples") || !frame["samples"].is_array()) {
        throw Error(ErrorCode::MalformedResponse, "samples frame lacks a 'samples' array");
    }
    const auto& rows = frame["samples"];
    if (rows.size() != request.num_samples) {
        throw Error(ErrorCode::ShapeMismatch, "adapter returned " + std::to_string(rows.size()) + " samples, expected " +
                                                  std::to_string(request.num_samples));
    }
    ForecastSamples out(request.num_samples, request.horizon);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        const auto row = real_array(rows[s], "sample");
        if (row.size() != request.horizon) {
            throw Error(ErrorCode::ShapeMismatch, "sample " + std::to_string(s) + " has " + std::to_string(row.size()) +
                                                      " steps, expected " + std::to_string(request.horizon));
        }
        std::copy(row.begin(), row.end(), out.row(s).begin());
    }
    return out;
}

std::optional<std::string> resolve_adapter_command(const std::optional<std::string>& flag)
{
    if (flag && !flag->empty()) {
        return flag;
    }
    if (const char* env = std::getenv("RAF_ADAPTER"); env != nullptr && *env != '\0') {
        return std::string(env);
    }
    return std::nullopt;
}

} // namespace raf
