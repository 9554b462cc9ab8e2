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

#pragma once

/**
 * @file
 * HTTP service: run sessions in the background and stream their records
 * over Server-Sent Events. Wire formats are documented in docs/formats.md.
 */

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vqh/run_config.hpp"
#include "vqh/sonification.hpp"

namespace vqh {

enum class SessionStatus { pending, running, done, aborted, failed };
std::string_view to_string(SessionStatus s);
bool is_terminal(SessionStatus s);

/// Artifact requested before the session finished.
class NotTerminalError : public Error {
  public:
    using Error::Error;
};

/// Session table is full.
class CapacityError : public Error {
  public:
    using Error::Error;
};

struct ServiceLimits {
    /// Encoded records kept in memory per session; older ones go to disk.
    std::size_t memory_records = 100000;
    /// Directory for spilled records; empty means the system temp dir.
    std::filesystem::path spill_dir;
    /// Terminal sessions untouched for this long are discarded.
    std::chrono::seconds idle_ttl{3600};
    std::size_t max_sessions = 64;
    std::size_t max_total_iterations = 1000000;
};

/// Append-only list of encoded records. The newest `memory_cap` entries
/// stay in memory; older ones are moved to a file.
class RecordLog {
  public:
    RecordLog(std::size_t memory_cap, std::filesystem::path spill_file);
    ~RecordLog();
    RecordLog(const RecordLog &) = delete;
    RecordLog &operator=(const RecordLog &) = delete;

    void append(std::string line);
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t spilled() const;
    /// Entries [from, from + max) in order.
    std::vector<std::string> read(std::size_t from, std::size_t max) const;

  private:
    void spill_front();

    std::size_t cap_;
    std::filesystem::path path_;
    mutable std::fstream file_;
    std::vector<std::uint64_t> offsets_;
    std::deque<std::string> memory_;
    std::size_t memory_start_ = 0; // index of memory_[0]
};

/// One background run.
class Session {
  public:
    Session(std::string id, PreparedRun run, const ServiceLimits &limits);
    ~Session();

    /// Launches the worker; no-op once started or aborted.
    void start();
    /// Idempotent; returns the status after the request. A pending session
    /// ends aborted without running.
    SessionStatus abort();

    [[nodiscard]] const std::string &id() const { return id_; }
    [[nodiscard]] SessionStatus status() const;
    [[nodiscard]] nlohmann::json describe() const;
    [[nodiscard]] std::size_t record_count() const;

    /// Waits up to `timeout` for records past `from` or a terminal status.
    /// Returns the new records (possibly none).
    std::vector<std::string> wait_records(std::size_t from,
                                          std::chrono::milliseconds timeout);

    /// Rendered artifact. `kind` is "stream_jsonl", "stream_csv",
    /// "wav:<strategy>" or "events". Throws Error (not terminal / bad kind).
    struct Artifact {
        std::string content_type;
        std::string body;
    };
    std::shared_ptr<const Artifact> artifact(const std::string &kind);

    void touch();
    [[nodiscard]] std::chrono::steady_clock::time_point last_access() const;

  private:
    void run(std::stop_token stop);

    std::string id_;
    PreparedRun prepared_;
    std::size_t planned_steps_ = 0;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    SessionStatus status_ = SessionStatus::pending;
    std::string message_;
    RecordLog log_;
    RunningNormalizer normalizer_;
    std::optional<RunResult> result_;
    std::map<std::string, std::shared_ptr<const Artifact>> artifacts_;
    std::chrono::steady_clock::time_point last_access_;
    std::chrono::system_clock::time_point created_;
    std::jthread worker_;
};

class SessionManager {
  public:
    explicit SessionManager(ServiceLimits limits = {});
    ~SessionManager();

    /// Parses and validates; throws ParseError / ValidationError /
    /// DomainError. The session is started unless `start` is false.
    std::shared_ptr<Session> create(const nlohmann::json &body,
                                    bool start = true);
    std::shared_ptr<Session> find(const std::string &id);
    std::vector<std::shared_ptr<Session>> list();
    /// Drops expired terminal sessions; returns how many were removed.
    std::size_t reap();
    void shutdown();

  private:
    ServiceLimits limits_;
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t counter_ = 0;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    ServiceLimits limits;
    std::size_t threads = 32;
    std::chrono::seconds heartbeat{15};
};

/// HTTP front end over SessionManager.
class Server {
  public:
    explicit Server(ServerOptions options = {});
    ~Server();
    Server(const Server &) = delete;
    Server &operator=(const Server &) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();

    SessionManager &sessions();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace vqh
