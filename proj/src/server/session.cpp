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

#include <random>
#include <sstream>

#include "vqh/error.hpp"
#include "vqh/format.hpp"
#include "vqh/server.hpp"

namespace vqh {

std::string_view to_string(SessionStatus s) {
    switch (s) {
    case SessionStatus::pending:
        return "pending";
    case SessionStatus::running:
        return "running";
    case SessionStatus::done:
        return "done";
    case SessionStatus::aborted:
        return "aborted";
    case SessionStatus::failed:
        return "failed";
    }
    return "?";
}

bool is_terminal(SessionStatus s) {
    return s == SessionStatus::done || s == SessionStatus::aborted ||
           s == SessionStatus::failed;
}

// --- RecordLog ---------------------------------------------------------------

RecordLog::RecordLog(std::size_t memory_cap, std::filesystem::path spill_file)
    : cap_(std::max<std::size_t>(memory_cap, 1)), path_(std::move(spill_file)),
      offsets_{0} {}

RecordLog::~RecordLog() {
    if (file_.is_open()) {
        file_.close();
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
}

void RecordLog::append(std::string line) {
    memory_.push_back(std::move(line));
    while (memory_.size() > cap_)
        spill_front();
}

void RecordLog::spill_front() {
    if (!file_.is_open()) {
        file_.open(path_, std::ios::in | std::ios::out | std::ios::binary |
                              std::ios::trunc);
        if (!file_)
            throw Error("cannot open spill file " + path_.string());
    }
    const std::string &line = memory_.front();
    file_.seekp(static_cast<std::streamoff>(offsets_.back()));
    file_.write(line.data(), static_cast<std::streamsize>(line.size()));
    file_.flush();
    if (!file_)
        throw Error("failed writing spill file " + path_.string());
    offsets_.push_back(offsets_.back() + line.size());
    memory_.pop_front();
    ++memory_start_;
}

std::size_t RecordLog::size() const { return memory_start_ + memory_.size(); }

std::size_t RecordLog::spilled() const { return memory_start_; }

std::vector<std::string> RecordLog::read(std::size_t from,
                                         std::size_t max) const {
    std::vector<std::string> out;
    const std::size_t end = std::min(size(), from + max);
    for (std::size_t i = from; i < end; ++i) {
        if (i >= memory_start_) {
            out.push_back(memory_[i - memory_start_]);
            continue;
        }
        std::string line(offsets_[i + 1] - offsets_[i], '\0');
        file_.seekg(static_cast<std::streamoff>(offsets_[i]));
        file_.read(line.data(), static_cast<std::streamsize>(line.size()));
        if (!file_)
            throw Error("failed reading spill file " + path_.string());
        out.push_back(std::move(line));
    }
    return out;
}

// --- Session -----------------------------------------------------------------

namespace {

std::filesystem::path spill_path(const ServiceLimits &limits,
                                 const std::string &id) {
    auto dir = limits.spill_dir.empty() ? std::filesystem::temp_directory_path()
                                        : limits.spill_dir;
    return dir / ("vqh-" + id + ".records");
}

nlohmann::json optional_number(const std::optional<double> &v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

Session::Session(std::string id, PreparedRun run, const ServiceLimits &limits)
    : id_(std::move(id)), prepared_(std::move(run)),
      log_(limits.memory_records, spill_path(limits, id_)),
      last_access_(std::chrono::steady_clock::now()),
      created_(std::chrono::system_clock::now()) {
    for (const auto &seg : prepared_.schedule.segments)
        planned_steps_ += seg.iterations;
}

Session::~Session() {
    if (worker_.joinable()) {
        worker_.request_stop();
        worker_.join();
    }
}

void Session::start() {
    std::lock_guard lk(mu_);
    if (status_ != SessionStatus::pending || worker_.joinable())
        return;
    worker_ = std::jthread([this](std::stop_token st) { run(st); });
}

void Session::run(std::stop_token stop) {
    {
        std::lock_guard lk(mu_);
        status_ = SessionStatus::running;
    }
    cv_.notify_all();

    const auto sink = [this](const IterationRecord &r) {
        std::lock_guard lk(mu_);
        Frame f{r.step,
                static_cast<double>(log_.size()) * prepared_.frame_duration,
                r.segment, r.marginals, r.expectation,
                normalizer_.push(r.expectation)};
        log_.append(encode_frame_json(f, prepared_.labels));
        cv_.notify_all();
    };

    SessionStatus final_status = SessionStatus::failed;
    std::string message;
    std::optional<RunResult> result;
    try {
        result = execute(prepared_, sink, stop);
        message = result->message;
        switch (result->status) {
        case RunStatus::completed:
            final_status = SessionStatus::done;
            break;
        case RunStatus::aborted:
            final_status = SessionStatus::aborted;
            break;
        case RunStatus::failed:
            final_status = SessionStatus::failed;
            break;
        }
    } catch (const std::exception &e) {
        message = e.what();
    }
    {
        std::lock_guard lk(mu_);
        result_ = std::move(result);
        message_ = std::move(message);
        status_ = final_status;
    }
    cv_.notify_all();
}

SessionStatus Session::abort() {
    touch();
    std::unique_lock lk(mu_);
    if (status_ == SessionStatus::pending && !worker_.joinable()) {
        status_ = SessionStatus::aborted;
        message_ = "aborted before start";
        cv_.notify_all();
    }
    if (!is_terminal(status_)) {
        worker_.request_stop();
        cv_.wait_for(lk, std::chrono::seconds(30),
                     [&] { return is_terminal(status_); });
    }
    return status_;
}

SessionStatus Session::status() const {
    std::lock_guard lk(mu_);
    return status_;
}

std::size_t Session::record_count() const {
    std::lock_guard lk(mu_);
    return log_.size();
}

nlohmann::json Session::describe() const {
    std::lock_guard lk(mu_);
    nlohmann::json j;
    j["id"] = id_;
    j["status"] = to_string(status_);
    j["records"] = log_.size();
    j["planned_steps"] = planned_steps_;
    j["labels"] = prepared_.labels;
    j["optimizer"] = to_string(prepared_.optimizer.kind);
    j["mode"] = prepared_.schedule.mode == ScheduleMode::adiabatic
                    ? "adiabatic"
                    : "sequential";
    j["frame_duration"] = prepared_.frame_duration;
    j["warnings"] = prepared_.warnings;
    j["message"] = message_;
    j["last_step"] = log_.size() ? nlohmann::json(log_.size() - 1)
                                 : nlohmann::json(nullptr);
    j["created"] = std::chrono::duration_cast<std::chrono::seconds>(
                       created_.time_since_epoch())
                       .count();
    std::optional<double> final_e, ground;
    if (result_ && !result_->records.empty()) {
        final_e = result_->final_expectation;
        ground = result_->ground_energy;
    }
    j["final_expectation"] = optional_number(final_e);
    j["ground_energy"] = optional_number(ground);
    return j;
}

std::vector<std::string>
Session::wait_records(std::size_t from, std::chrono::milliseconds timeout) {
    std::unique_lock lk(mu_);
    cv_.wait_for(lk, timeout,
                 [&] { return log_.size() > from || is_terminal(status_); });
    last_access_ = std::chrono::steady_clock::now();
    return log_.read(from, 1000);
}

std::shared_ptr<const Session::Artifact>
Session::artifact(const std::string &kind) {
    touch();
    std::lock_guard lk(mu_);
    if (!is_terminal(status_))
        throw NotTerminalError("session " + id_ + " is " +
                               std::string(to_string(status_)) +
                               "; artifacts are available once it ends");
    if (auto it = artifacts_.find(kind); it != artifacts_.end())
        return it->second;

    if (!result_ || result_->records.empty())
        throw Error("session " + id_ + " produced no records");
    const auto stream =
        build_stream(*result_, prepared_.frame_duration, prepared_.labels);

    auto art = std::make_shared<Artifact>();
    if (kind == "stream_jsonl") {
        art->content_type = "application/x-ndjson";
        art->body = encode_stream(stream, ExportFormat::jsonl);
    } else if (kind == "stream_csv") {
        art->content_type = "text/csv";
        art->body = encode_stream(stream, ExportFormat::csv);
    } else if (kind == "events" || kind.rfind("wav:", 0) == 0) {
        MappingConfig cfg;
        cfg.strategy = kind == "events" ? Strategy::arpeggio
                                        : parse_strategy(kind.substr(4));
        cfg.tuning.notes = prepared_.labels.size();
        if (cfg.strategy == Strategy::inharmonic)
            cfg.tuning.mode = TuningMode::harmonic_series;
        auto rendered = render(stream, cfg);
        if (kind == "events") {
            art->content_type = "application/x-ndjson";
            art->body = encode_events(*rendered.events, prepared_.labels);
        } else {
            art->content_type = "audio/wav";
            art->body = encode_wav(rendered.buffer);
        }
    } else {
        throw DomainError("unknown artifact kind '" + kind +
                          "' (valid: stream_jsonl, stream_csv, events, "
                          "wav:<strategy>)");
    }
    artifacts_[kind] = art;
    return art;
}

void Session::touch() {
    std::lock_guard lk(mu_);
    last_access_ = std::chrono::steady_clock::now();
}

std::chrono::steady_clock::time_point Session::last_access() const {
    std::lock_guard lk(mu_);
    return last_access_;
}

// --- SessionManager ----------------------------------------------------------

SessionManager::SessionManager(ServiceLimits limits)
    : limits_(std::move(limits)) {}

SessionManager::~SessionManager() { shutdown(); }

std::shared_ptr<Session> SessionManager::create(const nlohmann::json &body,
                                                bool start) {
    if (!body.is_object())
        throw ValidationError({"body: expected a JSON object"});
    for (const auto &[key, _] : body.items())
        if (key != "qubo_csv" && key != "config")
            throw ValidationError({key + ": unknown field"});
    if (!body.contains("qubo_csv") || !body["qubo_csv"].is_string())
        throw ValidationError({"qubo_csv: required string"});

    const QuboProblem base =
        parse_qubo_csv(body["qubo_csv"].get<std::string>());
    const RunConfig cfg =
        parse_run_config(body.value("config", nlohmann::json::object()));
    PreparedRun prepared = prepare_run(base, cfg, {}, false);

    std::size_t total = 0;
    for (const auto &seg : prepared.schedule.segments)
        total += seg.iterations;
    if (total > limits_.max_total_iterations)
        throw ValidationError(
            {"iterations: total of " + std::to_string(total) +
             " exceeds the service limit of " +
             std::to_string(limits_.max_total_iterations)});

    reap();
    std::lock_guard lk(mu_);
    if (sessions_.size() >= limits_.max_sessions)
        throw CapacityError("session limit of " +
                            std::to_string(limits_.max_sessions) + " reached");
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream id;
    id << 's' << ++counter_ << '-' << std::hex << (rng() & 0xFFFFFFFFu);
    auto session =
        std::make_shared<Session>(id.str(), std::move(prepared), limits_);
    sessions_[session->id()] = session;
    if (start)
        session->start();
    return session;
}

std::shared_ptr<Session> SessionManager::find(const std::string &id) {
    std::lock_guard lk(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end())
        return nullptr;
    it->second->touch();
    return it->second;
}

std::vector<std::shared_ptr<Session>> SessionManager::list() {
    std::lock_guard lk(mu_);
    std::vector<std::shared_ptr<Session>> out;
    for (const auto &[_, s] : sessions_)
        out.push_back(s);
    return out;
}

std::size_t SessionManager::reap() {
    const auto now = std::chrono::steady_clock::now();
    std::vector<std::shared_ptr<Session>> dropped;
    {
        std::lock_guard lk(mu_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            const auto &s = it->second;
            if (is_terminal(s->status()) &&
                now - s->last_access() >= limits_.idle_ttl) {
                dropped.push_back(s);
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }
    return dropped.size();
}

void SessionManager::shutdown() {
    std::map<std::string, std::shared_ptr<Session>> all;
    {
        std::lock_guard lk(mu_);
        all.swap(sessions_);
    }
    for (auto &[_, s] : all)
        s->abort();
}

} // namespace vqh
