#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "slimegate/gates.hpp"

namespace slimegate {

inline constexpr int kMaxSessions = 16;
inline constexpr int kMaxSnapshotSide = 128;

class SessionError : public std::runtime_error {
public:
    enum class Kind { unknown_session, unknown_channel, bad_request, capacity, closed };
    SessionError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Block-averaged copy of a grid no wider or taller than `max_side` cells.
struct Downsampled {
    int w = 0;
    int h = 0;
    std::vector<double> cells;  // row-major, bottom row first
};
Downsampled downsample(const std::vector<double>& values, int w, int h, int max_side = kMaxSnapshotSide);

struct Snapshot {
    std::string session;
    long tick = 0;
    Mode mode = Mode::exploring;
    InputBits inputs;
    double voltage = 0.0;
    int logic = 0;
    int tubules = 0;
    bool paused = true;
    bool end = false;  // last message of a stream
    Downsampled grid;     // trail
    Downsampled density;  // agents per cell
};

/// {tick, mode, inputs, output:{voltage, logic}, grid:{w, h, cells}, ...} on one line.
std::string snapshot_json(const Snapshot& snapshot);

struct OperatorEvent {
    long tick = 0;
    std::string action;  // "inputs", "pause", "resume", "speed", "close"
    std::string detail;
};

struct SessionOptions {
    GateKind kind = GateKind::pnot;
    std::uint64_t seed = 0;
    double speed = 60.0;  // ticks per real second while running
    std::optional<InputBits> inputs;  // all channels 0 by default
    Calibration calibration;
};

/// One live gate simulation advanced by its own timer thread. Every mutation
/// happens under the session lock, so readers only see tick-boundary states.
class Session {
public:
    Session(std::string id, const SessionOptions& options, GateHarness harness, std::shared_ptr<const Arena> arena);
    ~Session();
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    const std::string& id() const { return id_; }

    /// Latches new inputs; they apply before the next tick. Returns that tick.
    long set_inputs(const InputBits& inputs);
    void pause();
    void resume();
    void set_speed(double ticks_per_second);
    /// Advances `ticks` immediately, running or not.
    long advance(long ticks);
    void close();

    bool closed() const;
    Snapshot snapshot() const;
    GateOutcome outcome() const;
    std::vector<OperatorEvent> events() const;
    /// Input changes as a script the CLI accepts ("tick channel=bit,...").
    std::string export_script() const;

    /// Sleeps up to `timeout`, waking early when the session closes. Returns closed().
    bool wait_closed(std::chrono::milliseconds timeout) const;

private:
    void run_timer();
    void step_locked(long ticks);
    void log(std::string action, std::string detail);

    std::string id_;
    GateHarness harness_;
    std::shared_ptr<const Arena> arena_;
    std::uint64_t seed_;
    std::unique_ptr<GateRun> run_;
    InputBits latch_;
    std::vector<OperatorEvent> events_;
    double speed_;
    bool paused_ = true;
    bool closed_ = false;
    double owed_ticks_ = 0.0;

    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::condition_variable wake_;
    std::thread timer_;
};

/// Bounded registry of live sessions.
class SessionManager {
public:
    explicit SessionManager(int capacity = kMaxSessions) : capacity_(capacity) {}

    std::shared_ptr<Session> create(const SessionOptions& options);
    /// Throws SessionError(unknown_session).
    std::shared_ptr<Session> get(const std::string& id) const;
    void close(const std::string& id);
    void close_all();
    int size() const;
    int capacity() const { return capacity_; }

private:
    int capacity_;
    std::uint64_t next_id_ = 1;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::map<std::string, std::shared_ptr<const Arena>> arenas_;  // by gate and calibration digest
    mutable std::mutex mutex_;
};

struct GatewayOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    int capacity = kMaxSessions;
    int stream_interval_ms = 250;
};

/// HTTP front end:
///   POST   /sessions               {gate, seed, speed, inputs?} -> {id, tick}
///   POST   /sessions/{id}/inputs   {channel: bit, ...}          -> {tick}
///   POST   /sessions/{id}/pause, /resume, /speed {speed}, /step {ticks}, /close
///   DELETE /sessions/{id}
///   GET    /sessions/{id}/snapshot, /script, /outcome
///   GET    /sessions/{id}/stream   one snapshot per line until the session ends
class Gateway {
public:
    explicit Gateway(GatewayOptions options = {});
    ~Gateway();
    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    void stop();
    SessionManager& sessions() { return sessions_; }

private:
    struct Server;
    GatewayOptions options_;
    SessionManager sessions_;
    std::unique_ptr<Server> server_;
    std::thread thread_;
};

}  // namespace slimegate
