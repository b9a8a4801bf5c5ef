#include <csignal>
#include <cstdio>
#include <thread>

#include "CLI11.hpp"

#include "slimegate/gateway.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Live gate sessions over HTTP"};
    slimegate::GatewayOptions options;
    app.add_option("--host", options.host, "Bind address");
    app.add_option("--port", options.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
    app.add_option("--capacity", options.capacity, "Maximum live sessions")->check(CLI::Range(1, slimegate::kMaxSessions));
    app.add_option("--interval-ms", options.stream_interval_ms, "Snapshot cadence of streams")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    slimegate::Gateway gateway(options);
    int port = 0;
    try {
        port = gateway.start();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "io: %s\n", e.what());
        return 4;
    }
    std::printf("listening on %s:%d\n", options.host.c_str(), port);
    std::fflush(stdout);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    gateway.stop();
    return 0;
}
