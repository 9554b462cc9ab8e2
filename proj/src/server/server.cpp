// Copyright 2026 The VQH Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>

#include <httplib.h>

#include "vqh/error.hpp"
#include "vqh/kernels.hpp"
#include "vqh/server.hpp"

namespace vqh {

namespace {

using nlohmann::json;

void send_json(httplib::Response &res, int status, const json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, int status, std::string_view kind,
                const std::string &message, json extra = json::object()) {
    extra["error"] = message;
    extra["kind"] = kind;
    send_json(res, status, extra);
}

// Maps library exceptions onto HTTP statuses.
template <class F>
void guarded(httplib::Response &res, F &&f) {
    try {
        f();
    } catch (const json::exception &e) {
        send_error(res, 400, "malformed_json", e.what());
    } catch (const ValidationError &e) {
        send_error(res, 422, "validation", e.what(), {{"issues", e.issues()}});
    } catch (const ParseError &e) {
        json extra = json::object();
        if (e.row())
            extra["row"] = e.row();
        if (e.column())
            extra["column"] = e.column();
        send_error(res, 422, "parse", e.what(), extra);
    } catch (const NotTerminalError &e) {
        send_error(res, 409, "not_terminal", e.what());
    } catch (const CapacityError &e) {
        send_error(res, 503, "capacity", e.what());
    } catch (const DomainError &e) {
        send_error(res, 422, "domain", e.what());
    } catch (const DimensionError &e) {
        send_error(res, 422, "dimension", e.what());
    } catch (const std::exception &e) {
        send_error(res, 500, "internal", e.what());
    }
}

std::string sse_event(std::string_view event, const std::string &data,
                      std::optional<std::size_t> id = std::nullopt) {
    std::string out;
    if (id)
        out += "id: " + std::to_string(*id) + '\n';
    out += "event: ";
    out += event;
    out += "\ndata: " + data + "\n\n";
    return out;
}

std::optional<std::size_t> parse_index(const std::string &text) {
    if (text.empty() || text.size() > 18 ||
        text.find_first_not_of("0123456789") != std::string::npos)
        return std::nullopt;
    return static_cast<std::size_t>(std::stoull(text));
}

} // namespace

struct Server::Impl {
    ServerOptions options;
    SessionManager manager;
    httplib::Server http;
    std::atomic<bool> stopping{false};
    std::jthread listener;
    std::jthread reaper;

    explicit Impl(ServerOptions opts)
        : options(std::move(opts)), manager(options.limits) {
        const std::size_t threads = std::max<std::size_t>(options.threads, 2);
        http.new_task_queue = [threads] {
            return new httplib::ThreadPool(threads);
        };
        http.set_payload_max_length(16u << 20);
        http.set_default_headers(
            {{"Access-Control-Allow-Origin", "*"},
             {"Access-Control-Allow-Headers", "Content-Type, Last-Event-ID"},
             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        routes();
    }

    std::shared_ptr<Session> lookup(const httplib::Request &req,
                                    httplib::Response &res) {
        auto s = manager.find(req.matches[1]);
        if (!s)
            send_error(res, 404, "not_found",
                       "no session '" + std::string(req.matches[1]) + "'");
        return s;
    }

    void routes() {
        http.Options(".*", [](const httplib::Request &, httplib::Response &res) {
            res.status = 204;
        });

        http.Get("/health", [](const httplib::Request &, httplib::Response &res) {
            send_json(res, 200,
                      {{"status", "ok"}, {"kernels", kernels::active().name}});
        });

        http.Get("/sessions", [this](const httplib::Request &,
                                     httplib::Response &res) {
            json list = json::array();
            for (const auto &s : manager.list())
                list.push_back(s->describe());
            send_json(res, 200, {{"sessions", list}});
        });

        http.Post("/sessions", [this](const httplib::Request &req,
                                      httplib::Response &res) {
            guarded(res, [&] {
                const auto body = json::parse(req.body);
                auto s = manager.create(body);
                res.set_header("Location", "/sessions/" + s->id());
                send_json(res, 201, s->describe());
            });
        });

        http.Get("/sessions/([^/]+)", [this](const httplib::Request &req,
                                             httplib::Response &res) {
            if (auto s = lookup(req, res))
                send_json(res, 200, s->describe());
        });

        http.Post("/sessions/([^/]+)/abort", [this](const httplib::Request &req,
                                                    httplib::Response &res) {
            if (auto s = lookup(req, res)) {
                s->abort();
                send_json(res, 200, s->describe());
            }
        });

        http.Get("/sessions/([^/]+)/artifacts/([^/]+)",
                 [this](const httplib::Request &req, httplib::Response &res) {
                     auto s = lookup(req, res);
                     if (!s)
                         return;
                     guarded(res, [&] {
                         const auto art = s->artifact(req.matches[2]);
                         res.status = 200;
                         res.set_content(art->body, art->content_type);
                     });
                 });

        http.Get("/sessions/([^/]+)/events", [this](const httplib::Request &req,
                                                    httplib::Response &res) {
            auto s = lookup(req, res);
            if (!s)
                return;
            std::size_t from = 0;
            if (req.has_param("from")) {
                auto v = parse_index(req.get_param_value("from"));
                if (!v)
                    return send_error(res, 400, "bad_request",
                                      "'from' must be a non-negative integer");
                from = *v;
            } else if (req.has_header("Last-Event-ID")) {
                if (auto v = parse_index(req.get_header_value("Last-Event-ID")))
                    from = *v + 1;
            }
            stream_events(res, std::move(s), from);
        });
    }

    void stream_events(httplib::Response &res, std::shared_ptr<Session> s,
                       std::size_t from) {
        struct Cursor {
            std::size_t next;
            std::chrono::steady_clock::time_point last_write;
        };
        auto cursor = std::make_shared<Cursor>(
            Cursor{from, std::chrono::steady_clock::now()});
        res.set_header("Cache-Control", "no-cache");
        res.set_header("X-Accel-Buffering", "no");
        res.set_chunked_content_provider(
            "text/event-stream",
            [this, s, cursor](std::size_t, httplib::DataSink &sink) {
                if (stopping)
                    return false;
                const auto lines = s->wait_records(
                    cursor->next, std::chrono::milliseconds(250));
                const auto now = std::chrono::steady_clock::now();
                for (const auto &line : lines) {
                    const auto ev = sse_event("record", line, cursor->next++);
                    if (!sink.write(ev.data(), ev.size()))
                        return false;
                    cursor->last_write = now;
                }
                if (!lines.empty())
                    return true;
                if (is_terminal(s->status()) &&
                    cursor->next >= s->record_count()) {
                    const auto ev = sse_event("status", s->describe().dump());
                    sink.write(ev.data(), ev.size());
                    sink.done();
                    return true;
                }
                if (now - cursor->last_write >= options.heartbeat) {
                    static constexpr std::string_view beat = ": keepalive\n\n";
                    if (!sink.write(beat.data(), beat.size()))
                        return false;
                    cursor->last_write = now;
                }
                return true;
            });
    }

    int bind() {
        const int port =
            options.port == 0
                ? http.bind_to_any_port(options.host)
                : (http.bind_to_port(options.host, options.port) ? options.port
                                                                  : -1);
        if (port < 0)
            throw Error("cannot bind " + options.host + ":" +
                        std::to_string(options.port));
        reaper = std::jthread([this](std::stop_token st) {
            std::mutex m;
            std::condition_variable_any cv;
            std::unique_lock lk(m);
            while (!st.stop_requested()) {
                cv.wait_for(lk, st, std::chrono::seconds(1), [] { return false; });
                manager.reap();
            }
        });
        return port;
    }
};

Server::Server(ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

int Server::start() {
    const int port = impl_->bind();
    impl_->listener = std::jthread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return port;
}

void Server::run() {
    impl_->bind();
    impl_->http.listen_after_bind();
}

void Server::stop() {
    if (!impl_ || impl_->stopping.exchange(true))
        return;
    impl_->manager.shutdown();
    impl_->http.stop();
    if (impl_->listener.joinable())
        impl_->listener.join();
    impl_->reaper.request_stop();
    if (impl_->reaper.joinable())
        impl_->reaper.join();
}

SessionManager &Server::sessions() { return impl_->manager; }

} // namespace vqh
