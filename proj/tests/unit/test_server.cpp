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

#include <doctest.h>

#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "test_data.hpp"
#include "vqh/server.hpp"

using namespace vqh;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json example1_body(std::size_t iterations = 150) {
    auto cfg = json::parse(slurp(test_data("example1_nft.json")));
    cfg["iterations"] = iterations;
    return {{"qubo_csv", slurp(test_data("example1_cmaj_linear.csv"))}, {"config", cfg}};
}

struct SseEvent {
    std::optional<std::size_t> id;
    std::string event;
    std::string data;
};

// Reads events until a status event arrives or `stop_after` records were seen.
std::vector<SseEvent> read_events(httplib::Client &cli, const std::string &path,
                                  std::size_t stop_after = SIZE_MAX,
                                  httplib::Headers headers = {}) {
    std::vector<SseEvent> events;
    std::string buffer;
    std::size_t records = 0;
    cli.Get(path, headers, [&](const char *data, std::size_t len) {
        buffer.append(data, len);
        std::size_t pos;
        while ((pos = buffer.find("\n\n")) != std::string::npos) {
            const std::string block = buffer.substr(0, pos);
            buffer.erase(0, pos + 2);
            if (block.rfind(":", 0) == 0)
                continue;
            SseEvent ev;
            std::istringstream lines(block);
            for (std::string line; std::getline(lines, line);) {
                if (line.rfind("id: ", 0) == 0)
                    ev.id = std::stoull(line.substr(4));
                else if (line.rfind("event: ", 0) == 0)
                    ev.event = line.substr(7);
                else if (line.rfind("data: ", 0) == 0)
                    ev.data = line.substr(6);
            }
            events.push_back(ev);
            if (ev.event == "status")
                return false;
            if (ev.event == "record" && ++records >= stop_after)
                return false;
        }
        return true;
    });
    return events;
}

struct Fixture {
    Server server;
    int port;
    httplib::Client cli;

    explicit Fixture(ServiceLimits limits = {})
        : server(ServerOptions{"127.0.0.1", 0, limits, 16, std::chrono::seconds(1)}),
          port(server.start()), cli("127.0.0.1", port) {
        cli.set_read_timeout(60, 0);
    }

    std::string create(const json &body) {
        auto res = cli.Post("/sessions", body.dump(), "application/json");
        REQUIRE(res);
        REQUIRE(res->status == 201);
        return json::parse(res->body)["id"].get<std::string>();
    }

    json describe(const std::string &id) {
        auto res = cli.Get("/sessions/" + id);
        REQUIRE(res);
        return json::parse(res->body);
    }

    json wait_terminal(const std::string &id) {
        for (int i = 0; i < 600; ++i) {
            auto d = describe(id);
            const auto st = d["status"].get<std::string>();
            if (st == "done" || st == "aborted" || st == "failed")
                return d;
            std::this_thread::sleep_for(50ms);
        }
        FAIL("session did not finish");
        return {};
    }
};

void check_contiguous(const std::vector<SseEvent> &events, std::size_t first) {
    std::size_t expect = first;
    for (const auto &ev : events) {
        if (ev.event != "record")
            continue;
        REQUIRE(ev.id.has_value());
        CHECK(*ev.id == expect);
        CHECK(json::parse(ev.data)["step"].get<std::size_t>() == expect);
        ++expect;
    }
}

} // namespace

TEST_CASE("health and CORS") {
    Fixture f;
    auto res = f.cli.Get("/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["status"] == "ok");
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
    res = f.cli.Options("/sessions");
    REQUIRE(res);
    CHECK(res->status == 204);
}

TEST_CASE("example 1 session streams 150 records and finishes") {
    Fixture f;
    const auto id = f.create(example1_body());
    const auto events = read_events(f.cli, "/sessions/" + id + "/events");
    REQUIRE(events.size() == 151);
    check_contiguous(events, 0);
    CHECK(events.back().event == "status");
    const auto status = json::parse(events.back().data);
    CHECK(status["status"] == "done");
    CHECK(status["records"] == 150);
    CHECK(status["last_step"] == 149);
    CHECK(status["ground_energy"] == -24.0);
    CHECK(std::abs(status["final_expectation"].get<double>() + 24.0) < 0.1);
    const auto last = json::parse(events[149].data);
    CHECK(last["marginals"]["C"].get<double>() > 0.9);
    CHECK(last["marginals"]["C#"].get<double>() < 0.1);
    CHECK(last["u"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("bad requests") {
    Fixture f;
    auto body = example1_body();
    auto csv = body["qubo_csv"].get<std::string>();
    csv.replace(csv.find("-1"), 2, "x1");
    body["qubo_csv"] = csv;
    auto res = f.cli.Post("/sessions", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 422);
    auto err = json::parse(res->body);
    CHECK(err["kind"] == "parse");
    CHECK(err["row"] == 3);
    CHECK(err["column"] == 1);

    res = f.cli.Post("/sessions", "{not json", "application/json");
    CHECK(res->status == 400);
    CHECK(json::parse(res->body)["kind"] == "malformed_json");

    res = f.cli.Post("/sessions", R"({"qubo_csv": "C\n1\n", "extra": 1})", "application/json");
    CHECK(res->status == 422);
    CHECK(json::parse(res->body)["kind"] == "validation");

    body = example1_body();
    body["config"]["schedule"] = {{"segments", {{{"qubo", "/etc/hosts"}}}}};
    res = f.cli.Post("/sessions", body.dump(), "application/json");
    CHECK(res->status == 422);

    body = example1_body();
    body["config"]["optimizer"]["kind"] = "adam";
    res = f.cli.Post("/sessions", body.dump(), "application/json");
    CHECK(res->status == 422);
    CHECK_FALSE(json::parse(res->body)["issues"].empty());

    res = f.cli.Get("/sessions/nope");
    CHECK(res->status == 404);
    CHECK(json::parse(res->body)["kind"] == "not_found");
    CHECK(f.cli.Get("/sessions/nope/events")->status == 404);
    CHECK(f.cli.Post("/sessions/nope/abort")->status == 404);
}

TEST_CASE("concurrent sessions finish independently with identical output") {
    Fixture f;
    std::vector<std::future<std::string>> futures;
    for (int i = 0; i < 6; ++i)
        futures.push_back(std::async(std::launch::async, [&] {
            httplib::Client c("127.0.0.1", f.port);
            auto res = c.Post("/sessions", example1_body().dump(), "application/json");
            return json::parse(res->body)["id"].get<std::string>();
        }));
    std::vector<std::string> ids;
    for (auto &fut : futures)
        ids.push_back(fut.get());
    std::string reference;
    for (const auto &id : ids) {
        CHECK(f.wait_terminal(id)["records"] == 150);
        auto res = f.cli.Get("/sessions/" + id + "/artifacts/stream_jsonl");
        REQUIRE(res->status == 200);
        if (reference.empty())
            reference = res->body;
        CHECK(res->body == reference);
    }
    auto list = json::parse(f.cli.Get("/sessions")->body);
    CHECK(list["sessions"].size() == 6);
}

TEST_CASE("replay after completion, with from and Last-Event-ID") {
    Fixture f;
    const auto id = f.create(example1_body());
    f.wait_terminal(id);
    auto all = read_events(f.cli, "/sessions/" + id + "/events?from=0");
    CHECK(all.size() == 151);
    check_contiguous(all, 0);
    auto tail = read_events(f.cli, "/sessions/" + id + "/events?from=140");
    CHECK(tail.size() == 11);
    check_contiguous(tail, 140);
    auto resumed = read_events(f.cli, "/sessions/" + id + "/events", SIZE_MAX,
                               {{"Last-Event-ID", "99"}});
    CHECK(resumed.size() == 51);
    check_contiguous(resumed, 100);
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(resumed[i].data == all[100 + i].data);
    CHECK(f.cli.Get("/sessions/" + id + "/events?from=abc")->status == 400);
}

TEST_CASE("mid-run subscribers see contiguous steps") {
    Fixture f;
    const auto id = f.create(example1_body(40000));
    while (f.describe(id)["records"].get<std::size_t>() < 200)
        std::this_thread::sleep_for(10ms);
    auto events = read_events(f.cli, "/sessions/" + id + "/events?from=150", 500);
    CHECK(events.size() == 500);
    check_contiguous(events, 150);

    auto res = f.cli.Get("/sessions/" + id + "/artifacts/stream_jsonl");
    CHECK(res->status == 409);
    CHECK(json::parse(res->body)["kind"] == "not_terminal");

    res = f.cli.Post("/sessions/" + id + "/abort");
    REQUIRE(res);
    const auto first = json::parse(res->body);
    CHECK(first["status"] == "aborted");
    res = f.cli.Post("/sessions/" + id + "/abort");
    const auto second = json::parse(res->body);
    CHECK(second["status"] == "aborted");
    CHECK(second["records"] == first["records"]);
    CHECK(first["records"].get<std::size_t>() < 40000);

    // The stream of an aborted session ends with its status.
    auto rest = read_events(f.cli, "/sessions/" + id + "/events?from=" +
                                       std::to_string(first["records"].get<std::size_t>()));
    REQUIRE(rest.size() == 1);
    CHECK(json::parse(rest[0].data)["status"] == "aborted");
}

TEST_CASE("abort before start") {
    SessionManager m;
    auto s = m.create(example1_body(), false);
    CHECK(s->status() == SessionStatus::pending);
    CHECK(s->abort() == SessionStatus::aborted);
    CHECK(s->record_count() == 0);
    s->start();
    CHECK(s->status() == SessionStatus::aborted);
    CHECK(s->describe()["last_step"].is_null());
    CHECK_THROWS_AS(s->artifact("stream_jsonl"), Error);
}

TEST_CASE("artifacts") {
    Fixture f;
    const auto id = f.create(example1_body());
    f.wait_terminal(id);
    const std::string base = "/sessions/" + id + "/artifacts/";

    auto a = f.cli.Get(base + "stream_jsonl");
    auto b = f.cli.Get(base + "stream_jsonl");
    REQUIRE(a->status == 200);
    CHECK(a->body == b->body);
    CHECK(a->get_header_value("Content-Type") == "application/x-ndjson");

    // Same bytes as an offline run of the same configuration.
    const auto body = example1_body();
    const auto prepared = prepare_run(parse_qubo_csv(body["qubo_csv"].get<std::string>()),
                                      parse_run_config(body["config"]));
    const auto offline = build_stream(execute(prepared), prepared.frame_duration, prepared.labels);
    CHECK(a->body == encode_stream(offline, ExportFormat::jsonl));
    CHECK(f.cli.Get(base + "stream_csv")->body == encode_stream(offline, ExportFormat::csv));

    for (std::string kind : {"wav:additive", "wav:inharmonic", "wav:subtractive", "wav:arpeggio"}) {
        auto w = f.cli.Get(base + kind);
        REQUIRE(w->status == 200);
        CHECK(w->get_header_value("Content-Type") == "audio/wav");
        CHECK(w->body.size() == 44 + 2 * 1653750);
        CHECK(f.cli.Get(base + kind)->body == w->body);
    }
    auto ev = f.cli.Get(base + "events");
    CHECK(ev->status == 200);
    CHECK_FALSE(ev->body.empty());
    CHECK(f.cli.Get(base + "wav:granular")->status == 422);
    CHECK(f.cli.Get(base + "midi")->status == 422);
}

TEST_CASE("limits") {
    ServiceLimits limits;
    limits.max_sessions = 1;
    limits.max_total_iterations = 1000;
    Fixture f(limits);
    auto res = f.cli.Post("/sessions", example1_body(5000).dump(), "application/json");
    CHECK(res->status == 422);
    const auto id = f.create(example1_body(1000));
    res = f.cli.Post("/sessions", example1_body().dump(), "application/json");
    CHECK(res->status == 503);
    CHECK(json::parse(res->body)["kind"] == "capacity");
    f.cli.Post("/sessions/" + id + "/abort");
}

TEST_CASE("idle terminal sessions are reaped") {
    ServiceLimits limits;
    limits.idle_ttl = std::chrono::seconds(0);
    SessionManager m(limits);
    auto s = m.create(example1_body(20));
    for (int i = 0; i < 200 && !is_terminal(s->status()); ++i)
        std::this_thread::sleep_for(10ms);
    REQUIRE(is_terminal(s->status()));
    CHECK(m.reap() == 1);
    CHECK(m.find(s->id()) == nullptr);
    CHECK(m.list().empty());
}

TEST_CASE("record log spills to disk and reads back in order") {
    const auto path = std::filesystem::temp_directory_path() / "vqh_test_spill.records";
    {
        RecordLog log(10, path);
        for (int i = 0; i < 25; ++i)
            log.append("{\"i\":" + std::to_string(i) + "}");
        CHECK(log.size() == 25);
        CHECK(log.spilled() == 15);
        CHECK(std::filesystem::exists(path));
        const auto all = log.read(0, 100);
        REQUIRE(all.size() == 25);
        for (int i = 0; i < 25; ++i)
            CHECK(all[static_cast<std::size_t>(i)] == "{\"i\":" + std::to_string(i) + "}");
        CHECK(log.read(12, 5).front() == "{\"i\":12}");
        CHECK(log.read(30, 5).empty());
    }
    CHECK_FALSE(std::filesystem::exists(path));
}

TEST_CASE("spilled sessions replay every record") {
    ServiceLimits limits;
    limits.memory_records = 16;
    Fixture f(limits);
    const auto id = f.create(example1_body());
    f.wait_terminal(id);
    const auto events = read_events(f.cli, "/sessions/" + id + "/events");
    CHECK(events.size() == 151);
    check_contiguous(events, 0);
}
