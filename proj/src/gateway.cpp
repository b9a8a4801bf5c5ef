#include "slimegate/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "slimegate/records.hpp"

namespace slimegate {

namespace {

using Json = nlohmann::ordered_json;
using namespace std::chrono_literals;

constexpr auto kTimerPeriod = 20ms;
constexpr long kMaxTicksPerWake = 500;  // keeps the lock short at extreme speeds
constexpr int kServerThreads = 2 * kMaxSessions + 8;

Json grid_json(const Downsampled& d) { return {{"w", d.w}, {"h", d.h}, {"cells", d.cells}}; }

}  // namespace

Downsampled downsample(const std::vector<double>& values, int w, int h, int max_side) {
    if (max_side < 1) throw std::invalid_argument("max_side must be >= 1");
    if (static_cast<std::size_t>(w) * static_cast<std::size_t>(h) != values.size()) {
        throw std::invalid_argument("grid size does not match its dimensions");
    }
    const int f = std::max(1, (std::max(w, h) + max_side - 1) / max_side);
    Downsampled d;
    d.w = (w + f - 1) / f;
    d.h = (h + f - 1) / f;
    d.cells.assign(static_cast<std::size_t>(d.w) * d.h, 0.0);
    for (int j = 0; j < d.h; ++j) {
        for (int i = 0; i < d.w; ++i) {
            double sum = 0.0;
            int n = 0;
            for (int y = j * f; y < std::min(h, (j + 1) * f); ++y) {
                for (int x = i * f; x < std::min(w, (i + 1) * f); ++x) {
                    sum += values[static_cast<std::size_t>(y) * w + x];
                    ++n;
                }
            }
            d.cells[static_cast<std::size_t>(j) * d.w + i] = sum / n;
        }
    }
    return d;
}

std::string snapshot_json(const Snapshot& s) {
    Json inputs = Json::object();
    for (const auto& [k, v] : s.inputs) inputs[k] = v;
    const Json j = {{"session", s.session},
                    {"tick", s.tick},
                    {"mode", to_string(s.mode)},
                    {"inputs", std::move(inputs)},
                    {"output", {{"voltage", s.voltage}, {"logic", s.logic}, {"tubules", s.tubules}}},
                    {"paused", s.paused},
                    {"end", s.end},
                    {"grid", grid_json(s.grid)},
                    {"density", grid_json(s.density)}};
    return j.dump();
}

// ------------------------------------------------------------------ session

Session::Session(std::string id, const SessionOptions& options, GateHarness harness,
                 std::shared_ptr<const Arena> arena)
    : id_(std::move(id)),
      harness_(std::move(harness)),
      arena_(std::move(arena)),
      seed_(options.seed),
      speed_(options.speed) {
    if (!(speed_ >= 0.0) || !std::isfinite(speed_)) throw SessionError(SessionError::Kind::bad_request, "speed must be >= 0");
    for (const auto& [channel, leds] : harness_.inputs) latch_[channel] = 0;
    if (options.inputs) {
        for (const auto& [channel, bit] : *options.inputs) {
            if (!latch_.count(channel)) throw SessionError(SessionError::Kind::unknown_channel, "unknown channel '" + channel + "'");
            if (bit != 0 && bit != 1) throw SessionError(SessionError::Kind::bad_request, "input bits must be 0 or 1");
            latch_[channel] = bit;
        }
    }
    run_ = std::make_unique<GateRun>(harness_, arena_, latch_, seed_);
    log("inputs", format_inputs(latch_));
    timer_ = std::thread([this] { run_timer(); });
}

Session::~Session() { close(); }

void Session::log(std::string action, std::string detail) {
    events_.push_back({run_->tick(), std::move(action), std::move(detail)});
}

long Session::set_inputs(const InputBits& inputs) {
    std::lock_guard lock(mutex_);
    if (closed_) throw SessionError(SessionError::Kind::closed, "session is closed");
    InputBits next = latch_;
    for (const auto& [channel, bit] : inputs) {
        if (!next.count(channel)) throw SessionError(SessionError::Kind::unknown_channel, "unknown channel '" + channel + "'");
        if (bit != 0 && bit != 1) throw SessionError(SessionError::Kind::bad_request, "input bits must be 0 or 1");
        next[channel] = bit;
    }
    latch_ = next;
    if (run_->tick() == 0) {
        // Nothing has happened yet, so the run simply starts from the new latch.
        run_ = std::make_unique<GateRun>(harness_, arena_, latch_, seed_);
        events_.front().detail = format_inputs(latch_);
    } else {
        run_->set_inputs(latch_);
        log("inputs", format_inputs(latch_));
    }
    changed_.notify_all();
    return run_->tick();
}

void Session::pause() {
    std::lock_guard lock(mutex_);
    if (closed_) throw SessionError(SessionError::Kind::closed, "session is closed");
    paused_ = true;
    log("pause", "");
}

void Session::resume() {
    std::lock_guard lock(mutex_);
    if (closed_) throw SessionError(SessionError::Kind::closed, "session is closed");
    paused_ = false;
    owed_ticks_ = 0.0;
    log("resume", "");
    wake_.notify_all();
}

void Session::set_speed(double ticks_per_second) {
    if (!(ticks_per_second >= 0.0) || !std::isfinite(ticks_per_second)) {
        throw SessionError(SessionError::Kind::bad_request, "speed must be >= 0");
    }
    std::lock_guard lock(mutex_);
    if (closed_) throw SessionError(SessionError::Kind::closed, "session is closed");
    speed_ = ticks_per_second;
    std::ostringstream s;
    s << ticks_per_second;
    log("speed", s.str());
}

long Session::advance(long ticks) {
    if (ticks < 0) throw SessionError(SessionError::Kind::bad_request, "ticks must be >= 0");
    std::lock_guard lock(mutex_);
    if (closed_) throw SessionError(SessionError::Kind::closed, "session is closed");
    step_locked(ticks);
    return run_->tick();
}

void Session::step_locked(long ticks) {
    for (long i = 0; i < ticks && !run_->terminal(); ++i) run_->step();
    changed_.notify_all();
}

void Session::close() {
    {
        std::lock_guard lock(mutex_);
        if (!closed_) {
            closed_ = true;
            log("close", "");
        }
        wake_.notify_all();
        changed_.notify_all();
    }
    if (timer_.joinable() && timer_.get_id() != std::this_thread::get_id()) timer_.join();
}

bool Session::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

void Session::run_timer() {
    std::unique_lock lock(mutex_);
    auto last = std::chrono::steady_clock::now();
    while (!closed_) {
        wake_.wait_for(lock, kTimerPeriod);
        const auto now = std::chrono::steady_clock::now();
        const double dt = std::chrono::duration<double>(now - last).count();
        last = now;
        if (closed_) break;
        if (paused_ || run_->terminal()) {
            owed_ticks_ = 0.0;
            continue;
        }
        owed_ticks_ += speed_ * dt;
        const long due = std::min(static_cast<long>(owed_ticks_), kMaxTicksPerWake);
        owed_ticks_ = std::min(owed_ticks_ - due, static_cast<double>(kMaxTicksPerWake));
        if (due > 0) step_locked(due);
    }
}

Snapshot Session::snapshot() const {
    std::lock_guard lock(mutex_);
    Snapshot s;
    s.session = id_;
    s.tick = run_->tick();
    s.mode = run_->state().mode;
    s.inputs = latch_;
    const OutputReading r = run_->reading();
    s.voltage = r.output_voltage;
    s.logic = r.logic_level;
    s.tubules = r.tubule_count;
    s.paused = paused_;
    s.end = closed_;
    const Grid trail = run_->state().trail.materialize();
    const GridSpec& spec = trail.spec;
    s.grid = downsample(trail.values, spec.width, spec.height);
    std::vector<double> density(spec.size(), 0.0);
    for (const auto& a : run_->state().agents) {
        int i = 0;
        int j = 0;
        if (spec.locate(a.position, i, j)) density[spec.index(i, j)] += 1.0;
    }
    s.density = downsample(density, spec.width, spec.height);
    return s;
}

GateOutcome Session::outcome() const {
    std::lock_guard lock(mutex_);
    return run_->outcome();
}

std::vector<OperatorEvent> Session::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::string Session::export_script() const {
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& e : events_) {
        if (e.action == "inputs") out += std::to_string(e.tick) + " " + e.detail + "\n";
    }
    return out;
}

bool Session::wait_closed(std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    changed_.wait_for(lock, timeout, [&] { return closed_; });
    return closed_;
}

// ------------------------------------------------------------------ manager

std::shared_ptr<Session> SessionManager::create(const SessionOptions& options) {
    std::lock_guard lock(mutex_);
    if (static_cast<int>(sessions_.size()) >= capacity_) {
        throw SessionError(SessionError::Kind::capacity,
                           "session capacity reached (" + std::to_string(capacity_) + ")");
    }
    GateHarness harness = options.kind == GateKind::pnot ? build_pnot() : build_pnand();
    const std::string key = std::string(to_string(options.kind)) + "/" + calibration_digest(options.calibration);
    auto& arena = arenas_[key];
    if (!arena) arena = Arena::build(harness.scene, options.calibration, arena_horizon(harness, true));
    const std::string id = "s" + std::to_string(next_id_++);
    auto session = std::make_shared<Session>(id, options, std::move(harness), arena);
    sessions_[id] = session;
    return session;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionError(SessionError::Kind::unknown_session, "unknown session '" + id + "'");
    return it->second;
}

void SessionManager::close(const std::string& id) {
    std::shared_ptr<Session> session;
    {
        std::lock_guard lock(mutex_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) throw SessionError(SessionError::Kind::unknown_session, "unknown session '" + id + "'");
        session = it->second;
        sessions_.erase(it);
    }
    session->close();
}

void SessionManager::close_all() {
    std::map<std::string, std::shared_ptr<Session>> open;
    {
        std::lock_guard lock(mutex_);
        open.swap(sessions_);
    }
    for (auto& [id, s] : open) s->close();
}

int SessionManager::size() const {
    std::lock_guard lock(mutex_);
    return static_cast<int>(sessions_.size());
}

// ------------------------------------------------------------------ server

struct Gateway::Server {
    httplib::Server http;
};

namespace {

int status_for(SessionError::Kind kind) {
    switch (kind) {
        case SessionError::Kind::unknown_session:
            return 404;
        case SessionError::Kind::capacity:
            return 503;
        case SessionError::Kind::closed:
            return 409;
        case SessionError::Kind::unknown_channel:
        case SessionError::Kind::bad_request:
            break;
    }
    return 400;
}

std::string_view kind_name(SessionError::Kind kind) {
    switch (kind) {
        case SessionError::Kind::unknown_session:
            return "unknown_session";
        case SessionError::Kind::unknown_channel:
            return "unknown_channel";
        case SessionError::Kind::capacity:
            return "capacity";
        case SessionError::Kind::closed:
            return "closed";
        case SessionError::Kind::bad_request:
            break;
    }
    return "bad_request";
}

void reply(httplib::Response& res, const Json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

Json body_of(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    Json j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw SessionError(SessionError::Kind::bad_request, "body must be a JSON object");
    return j;
}

InputBits bits_of(const Json& j) {
    InputBits bits;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number_integer()) throw SessionError(SessionError::Kind::bad_request, "input bits must be 0 or 1");
        bits[k] = v.get<int>();
    }
    return bits;
}

// Wraps a handler so every failure becomes a JSON error reply.
template <typename F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const SessionError& e) {
            reply(res, {{"error", kind_name(e.kind())}, {"message", e.what()}}, status_for(e.kind()));
        } catch (const std::exception& e) {
            reply(res, {{"error", "bad_request"}, {"message", e.what()}}, 400);
        }
    };
}

}  // namespace

Gateway::Gateway(GatewayOptions options)
    : options_(std::move(options)), sessions_(options_.capacity), server_(std::make_unique<Server>()) {
    httplib::Server& http = server_->http;
    http.new_task_queue = [] { return new httplib::ThreadPool(kServerThreads); };
    SessionManager& sm = sessions_;

    http.Post("/sessions", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        const Json b = body_of(req);
        SessionOptions o;
        const auto kind = gate_kind_from_string(b.value("gate", std::string("pnot")));
        if (!kind) throw SessionError(SessionError::Kind::bad_request, "gate must be pnot or pnand");
        o.kind = *kind;
        o.seed = b.value("seed", std::uint64_t{0});
        o.speed = b.value("speed", 60.0);
        if (b.contains("inputs")) o.inputs = bits_of(b.at("inputs"));
        const auto s = sm.create(o);
        reply(res, {{"id", s->id()}, {"tick", 0}}, 201);
    }));
    http.Post(R"(/sessions/([^/]+)/inputs)", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        const long tick = sm.get(req.matches[1])->set_inputs(bits_of(body_of(req)));
        reply(res, {{"tick", tick}});
    }));
    http.Post(R"(/sessions/([^/]+)/pause)", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        sm.get(req.matches[1])->pause();
        reply(res, {{"paused", true}});
    }));
    http.Post(R"(/sessions/([^/]+)/resume)", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        sm.get(req.matches[1])->resume();
        reply(res, {{"paused", false}});
    }));
    http.Post(R"(/sessions/([^/]+)/speed)", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        const Json b = body_of(req);
        if (!b.contains("speed") || !b.at("speed").is_number()) {
            throw SessionError(SessionError::Kind::bad_request, "speed must be a number");
        }
        sm.get(req.matches[1])->set_speed(b.at("speed").get<double>());
        reply(res, {{"speed", b.at("speed")}});
    }));
    http.Post(R"(/sessions/([^/]+)/step)", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        const long tick = sm.get(req.matches[1])->advance(body_of(req).value("ticks", 1L));
        reply(res, {{"tick", tick}});
    }));
    auto close = guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        sm.close(req.matches[1]);
        reply(res, {{"closed", true}});
    });
    http.Post(R"(/sessions/([^/]+)/close)", close);
    http.Delete(R"(/sessions/([^/]+))", close);
    http.Get(R"(/sessions/([^/]+)/snapshot)", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        res.set_content(snapshot_json(sm.get(req.matches[1])->snapshot()), "application/json");
    }));
    http.Get(R"(/sessions/([^/]+)/script)", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        res.set_content(sm.get(req.matches[1])->export_script(), "text/plain");
    }));
    http.Get(R"(/sessions/([^/]+)/outcome)", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
        res.set_content(outcome_to_json(sm.get(req.matches[1])->outcome()), "application/json");
    }));
    const int interval = options_.stream_interval_ms;
    http.Get(R"(/sessions/([^/]+)/stream)", guarded([&sm, interval](const httplib::Request& req, httplib::Response& res) {
        std::shared_ptr<Session> session = sm.get(req.matches[1]);
        const auto period = std::chrono::milliseconds(
            req.has_param("interval_ms") ? std::max(1, std::stoi(req.get_param_value("interval_ms"))) : interval);
        res.set_chunked_content_provider("application/x-ndjson", [session, period](std::size_t, httplib::DataSink& sink) {
            const Snapshot s = session->snapshot();
            const std::string line = snapshot_json(s) + "\n";
            if (!sink.write(line.data(), line.size())) return false;
            if (s.end) {
                sink.done();
                return true;
            }
            session->wait_closed(period);
            return true;
        });
    }));
}

Gateway::~Gateway() { stop(); }

int Gateway::start() {
    httplib::Server& http = server_->http;
    const int port = options_.port == 0 ? http.bind_to_any_port(options_.host) : (http.bind_to_port(options_.host, options_.port) ? options_.port : -1);
    if (port < 0) throw std::runtime_error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    thread_ = std::thread([&http] { http.listen_after_bind(); });
    return port;
}

void Gateway::stop() {
    if (!server_) return;
    // Closing sessions first lets open streams send their end marker.
    sessions_.close_all();
    server_->http.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace slimegate
