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
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "vqh/cli.hpp"
#include "vqh/error.hpp"
#include "vqh/format.hpp"
#include "vqh/server.hpp"

namespace vqh {

namespace {

namespace fs = std::filesystem;

constexpr double kConvergedGap = 0.1;
constexpr const char *kLastStream = "last_run.jsonl";
constexpr const char *kLastMeta = "last_run.json";

/// Command needs state that is not there yet.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

QuboProblem load_qubo(const std::string &path) {
    if (!fs::exists(path))
        throw Error("QUBO file not found: " + path);
    try {
        return load_qubo_csv(path);
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what(), e.row(), e.column());
    }
}

RunConfig load_config(const std::string &path) {
    if (path.empty())
        return {};
    if (!fs::exists(path))
        throw Error("config file not found: " + path);
    return load_run_config(path);
}

std::string num(double v) {
    std::ostringstream ss;
    ss << std::setprecision(6) << (std::abs(v) < 5e-13 ? 0.0 : v);
    return ss.str();
}

std::string note_list(const Configuration &c,
                      const std::vector<std::string> &labels) {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.bits()[i]) {
            if (!out.empty())
                out += ' ';
            out += labels[i];
        }
    return out.empty() ? "(none)" : out;
}

Configuration dominant(const std::vector<double> &marginals) {
    std::vector<std::uint8_t> bits;
    for (double m : marginals)
        bits.push_back(m > 0.5 ? 1 : 0);
    return Configuration(bits);
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot write " + path.string());
    f << text;
}

/// Smallest p with touched[t] == touched[t + p] for all t, if any.
std::optional<std::size_t> touch_period(const RunResult &run) {
    const auto &r = run.records;
    for (std::size_t p = 1; p < r.size(); ++p) {
        bool ok = true;
        for (std::size_t t = 0; ok && t + p < r.size(); ++t)
            ok = r[t].touched && r[t].touched == r[t + p].touched;
        if (ok)
            return p;
    }
    return std::nullopt;
}

struct Grounds {
    std::vector<double> qubo; // per segment
};

Grounds ground_energies(const PreparedRun &run) {
    Grounds g;
    for (const auto &q : run.problems)
        g.qubo.push_back(brute_force_solve(q).minimum);
    return g;
}

double record_gap(const PreparedRun &run, const Grounds &g,
                  const IterationRecord &r) {
    const auto &h = run.schedule.segments[r.segment].hamiltonian;
    return h.to_qubo_scale(r.expectation) - g.qubo[r.segment];
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

} // namespace

fs::path default_output_dir() {
    if (const char *dir = std::getenv("VQH_OUTPUT_DIR"); dir && *dir)
        return dir;
    return ".";
}

std::vector<std::string> split_command_line(const std::string &line) {
    std::vector<std::string> words;
    std::string cur;
    char quote = 0;
    bool any = false;
    for (char c : line) {
        if (quote ? c == quote : (c == '"' || c == '\'')) {
            quote = quote ? 0 : c;
            any = true;
        } else if (!quote && std::isspace(static_cast<unsigned char>(c))) {
            if (any || !cur.empty())
                words.push_back(std::move(cur));
            cur.clear();
            any = false;
        } else {
            cur += c;
        }
    }
    if (quote)
        throw vqh::ParseError("unterminated quote");
    if (any || !cur.empty())
        words.push_back(std::move(cur));
    return words;
}

Cli::Cli(std::ostream &out, std::ostream &err, fs::path output_dir)
    : out_(out), err_(err), output_dir_(std::move(output_dir)) {}

int Cli::execute(std::vector<std::string> args) {
    if (args.empty())
        return help();
    const std::string cmd = args.front();
    try {
        if (cmd == "runvqe")
            return runvqe(args);
        if (cmd == "play")
            return play(args);
        if (cmd == "oracle")
            return oracle(args);
        if (cmd == "compare-optimizers")
            return compare(args);
        if (cmd == "serve")
            return serve(args);
        if (cmd == "help" || cmd == "--help" || cmd == "-h")
            return help();
        err_ << "error: unknown command '" << cmd << "'\n";
        help();
        return exit_usage;
    } catch (const CLI::CallForHelp &) {
        return exit_ok;
    } catch (const CLI::Error &e) {
        err_ << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ValidationError &e) {
        err_ << "error: invalid configuration\n";
        for (const auto &issue : e.issues())
            err_ << "  " << issue << "\n";
        return exit_parse;
    } catch (const vqh::ParseError &e) {
        err_ << "error: " << e.what() << "\n";
        return exit_parse;
    } catch (const nlohmann::json::exception &e) {
        err_ << "error: " << e.what() << "\n";
        return exit_parse;
    } catch (const std::exception &e) {
        err_ << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}

namespace {

// CLI11 wants the words after the command name, reversed.
void parse_words(CLI::App &app, std::vector<std::string> &args,
                 std::ostream &out) {
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        throw;
    }
}

} // namespace

int Cli::runvqe(std::vector<std::string> &args) {
    CLI::App app{"Run the configured VQE schedule", "runvqe"};
    std::string qubo_path, config_path;
    std::optional<std::string> optimizer;
    std::optional<std::size_t> iterations;
    std::optional<std::uint64_t> seed;
    app.add_option("qubo", qubo_path, "QUBO CSV")->required();
    app.add_option("config", config_path, "run configuration JSON");
    app.add_option("--optimizer", optimizer, "spsa, nft or cobyla_like");
    app.add_option("--iterations", iterations, "steps per segment");
    app.add_option("--seed", seed, "optimizer seed");
    parse_words(app, args, out_);

    const QuboProblem base = load_qubo(qubo_path);
    RunConfig cfg = load_config(config_path);
    if (optimizer)
        cfg.optimizer.kind = parse_optimizer_kind(*optimizer);
    if (iterations)
        cfg.iterations = *iterations;
    if (seed)
        cfg.optimizer.seed = *seed;
    const fs::path config_dir =
        config_path.empty() ? fs::path{} : fs::path(config_path).parent_path();
    const PreparedRun run = prepare_run(base, cfg, config_dir);
    for (const auto &w : run.warnings)
        err_ << "warning: " << w << "\n";

    const RunResult result = vqh::execute(run);
    fs::create_directories(output_dir_);

    if (result.status != RunStatus::completed) {
        err_ << "error: run " << to_string(result.status) << " after "
             << result.records.size() << " steps: " << result.message << "\n";
        if (!result.records.empty()) {
            const auto partial = output_dir_ / "failed_run.jsonl";
            export_stream(build_stream(result, run.frame_duration, run.labels),
                          ExportFormat::jsonl, partial.string());
            err_ << "partial records saved to " << partial.string() << "\n";
        }
        return exit_runtime;
    }

    const Grounds grounds = ground_energies(run);
    out_ << "problem " << qubo_path << " (" << base.size() << " notes), "
         << run.schedule.segments.size() << " segment(s), "
         << result.records.size() << " steps, optimizer "
         << to_string(run.optimizer.kind) << "\n";
    for (std::size_t s = 0; s < run.schedule.segments.size(); ++s) {
        const IterationRecord *last = nullptr;
        for (const auto &r : result.records)
            if (r.segment == s)
                last = &r;
        if (!last)
            continue;
        const auto &seg = run.schedule.segments[s];
        out_ << "segment " << s << " " << seg.label << ": final energy "
             << num(seg.hamiltonian.to_qubo_scale(last->expectation))
             << " (Ising " << num(last->expectation) << "), ground "
             << num(grounds.qubo[s]) << ", gap "
             << num(record_gap(run, grounds, *last)) << "\n";
    }
    const auto &last = result.records.back();
    const auto &h = run.schedule.segments[last.segment].hamiltonian;
    const double ground_q = grounds.qubo[last.segment];
    out_ << "final energy " << num(h.to_qubo_scale(result.final_expectation))
         << " (QUBO scale), " << num(result.final_expectation)
         << " (Ising scale)\n";
    out_ << "ground energy " << num(ground_q) << " (QUBO scale), "
         << num(4.0 * ground_q - h.offset()) << " (Ising scale)\n";
    out_ << "gap " << num(record_gap(run, grounds, last)) << "\n";
    const auto top = dominant(last.marginals);
    out_ << "dominant notes " << note_list(top, run.labels) << " ("
         << top.to_string() << ")\n";

    auto stream = build_stream(result, run.frame_duration, run.labels);
    const auto stream_path = output_dir_ / kLastStream;
    export_stream(stream, ExportFormat::jsonl, stream_path.string());
    nlohmann::ordered_json meta;
    meta["qubo"] = qubo_path;
    meta["config"] = config_path;
    meta["frame_duration"] = run.frame_duration;
    meta["steps"] = result.records.size();
    meta["stream"] = kLastStream;
    write_text(output_dir_ / kLastMeta, meta.dump(2) + "\n");
    out_ << "stream written to " << stream_path.string() << "\n";

    state_.qubo_path = qubo_path;
    state_.config_path = config_path;
    state_.last_run = result;
    state_.last_stream = std::move(stream);
    return exit_ok;
}

std::optional<SonificationStream> Cli::stored_stream() {
    if (state_.last_stream)
        return state_.last_stream;
    const auto meta_path = output_dir_ / kLastMeta;
    const auto stream_path = output_dir_ / kLastStream;
    if (!fs::exists(meta_path) || !fs::exists(stream_path))
        return std::nullopt;
    std::ifstream f(meta_path);
    const auto meta = nlohmann::json::parse(f);
    return import_stream(stream_path.string(), ExportFormat::jsonl,
                         meta.value("frame_duration", 0.25));
}

int Cli::play(std::vector<std::string> &args) {
    CLI::App app{"Sonify the last run", "play"};
    std::string strategy_name;
    std::optional<double> frame_dur;
    std::string out_path;
    MappingConfig cfg;
    app.add_option("strategy", strategy_name,
                   "additive, inharmonic, subtractive or arpeggio")
        ->required();
    app.add_option("--frame-dur", frame_dur, "seconds per record");
    app.add_option("--out", out_path, "output WAV path");
    app.add_option("--sample-rate", cfg.sample_rate);
    app.add_option("--base-hz", cfg.tuning.base_hz);
    app.add_option("--shift-scale", cfg.shift_scale, "inharmonic detuning");
    app.add_option("--q-max", cfg.q_max, "subtractive Q at the ground energy");
    app.add_option("--threshold", cfg.arp_threshold, "arpeggio note threshold");
    app.add_option("--seed", cfg.noise_seed, "subtractive noise seed");
    parse_words(app, args, out_);

    try {
        cfg.strategy = parse_strategy(strategy_name);
    } catch (const DomainError &e) {
        err_ << "error: " << e.what() << "\n";
        return exit_usage;
    }
    auto stream = stored_stream();
    if (!stream)
        throw PreconditionError("no run to play; use runvqe first");
    if (frame_dur) {
        if (!(*frame_dur > 0.0))
            throw DomainError("--frame-dur must be positive");
        stream->frame_duration = *frame_dur;
        for (std::size_t i = 0; i < stream->frames.size(); ++i)
            stream->frames[i].time = static_cast<double>(i) * *frame_dur;
    }
    cfg.tuning.notes = stream->labels.size();
    if (cfg.strategy == Strategy::inharmonic)
        cfg.tuning.mode = TuningMode::harmonic_series;

    const auto rendered = render(*stream, cfg);
    fs::path wav = out_path.empty()
                       ? output_dir_ / (std::string(to_string(cfg.strategy)) + ".wav")
                       : fs::path(out_path);
    if (wav.has_parent_path())
        fs::create_directories(wav.parent_path());
    render_wav(rendered.buffer, wav.string());
    auto sidecar = wav;
    sidecar.replace_extension(".jsonl");
    export_stream(*stream, ExportFormat::jsonl, sidecar.string());

    const double peak = rendered.buffer.peak();
    out_ << "wrote " << wav.string() << ": " << num(rendered.buffer.duration())
         << " s, " << rendered.buffer.samples.size() << " samples at "
         << num(cfg.sample_rate) << " Hz, peak " << num(peak);
    if (peak > 0.0)
        out_ << " (" << num(20.0 * std::log10(peak)) << " dBFS)";
    out_ << "\n";
    out_ << "wrote " << sidecar.string() << "\n";
    if (rendered.events) {
        auto events = wav;
        events.replace_extension(".events.jsonl");
        write_text(events, encode_events(*rendered.events, stream->labels));
        out_ << "wrote " << events.string() << " (" << rendered.events->size()
             << " onsets)\n";
    }
    state_.last_stream = std::move(stream);
    return exit_ok;
}

int Cli::oracle(std::vector<std::string> &args) {
    CLI::App app{"Exhaustive minimum of a QUBO", "oracle"};
    std::string qubo_path;
    std::size_t max_listed = 32;
    app.add_option("qubo", qubo_path, "QUBO CSV")->required();
    app.add_option("--max-listed", max_listed, "minimizers to print");
    parse_words(app, args, out_);

    const QuboProblem q = load_qubo(qubo_path);
    if (q.size() > kMaxEnumerationSize)
        throw DomainError(std::to_string(q.size()) +
                          " variables exceeds the enumeration bound of " +
                          std::to_string(kMaxEnumerationSize));
    const auto res = brute_force_solve(q);
    const auto h = qubo_to_ising(q);
    out_ << "minimum cost " << num(res.minimum) << "\n";
    out_ << "Ising energy " << num(4.0 * res.minimum - h.offset())
         << " (offset " << num(h.offset()) << ", E = 4 Q - offset)\n";
    const std::size_t total = std::size_t{1} << q.size();
    if (res.argmin.size() == total)
        out_ << "all " << total << " configurations are degenerate\n";
    out_ << res.argmin.size() << " minimizer(s):\n";
    for (std::size_t i = 0; i < res.argmin.size() && i < max_listed; ++i)
        out_ << "  " << res.argmin[i].to_string() << "  "
             << note_list(res.argmin[i], q.labels()) << "\n";
    if (res.argmin.size() > max_listed)
        out_ << "  ... " << res.argmin.size() - max_listed << " more\n";
    return exit_ok;
}

int Cli::compare(std::vector<std::string> &args) {
    CLI::App app{"Run one problem under every optimizer", "compare-optimizers"};
    std::string qubo_path, config_path;
    app.add_option("qubo", qubo_path, "QUBO CSV")->required();
    app.add_option("config", config_path, "run configuration JSON");
    parse_words(app, args, out_);

    const QuboProblem base = load_qubo(qubo_path);
    const RunConfig cfg = load_config(config_path);
    const fs::path config_dir =
        config_path.empty() ? fs::path{} : fs::path(config_path).parent_path();
    fs::create_directories(output_dir_);

    out_ << std::left << std::setw(13) << "optimizer" << std::setw(12)
         << "final" << std::setw(12) << "gap" << std::setw(11) << "converged"
         << "touch period\n";
    bool all_ok = true;
    for (auto kind : {OptimizerKind::spsa, OptimizerKind::nft,
                      OptimizerKind::cobyla_like}) {
        RunConfig c = cfg;
        c.optimizer.kind = kind;
        const PreparedRun run = prepare_run(base, c, config_dir);
        const RunResult result = vqh::execute(run);
        const auto path =
            output_dir_ / ("compare_" + std::string(to_string(kind)) + ".jsonl");
        if (result.records.empty()) {
            all_ok = false;
            out_ << std::setw(13) << to_string(kind) << "no records ("
                 << result.message << ")\n";
            continue;
        }
        export_stream(build_stream(result, run.frame_duration, run.labels),
                      ExportFormat::jsonl, path.string());
        const Grounds grounds = ground_energies(run);
        std::optional<std::size_t> converged;
        for (const auto &r : result.records)
            if (record_gap(run, grounds, r) < kConvergedGap) {
                converged = r.step;
                break;
            }
        const auto &last = result.records.back();
        const auto period = touch_period(result);
        out_ << std::setw(13) << to_string(kind) << std::setw(12)
             << num(run.schedule.segments[last.segment].hamiltonian.to_qubo_scale(
                    last.expectation))
             << std::setw(12) << num(record_gap(run, grounds, last))
             << std::setw(11)
             << (converged ? std::to_string(*converged) : std::string("never"))
             << (period ? std::to_string(*period) : std::string("-")) << "\n";
        if (result.status != RunStatus::completed)
            all_ok = false;
    }
    out_ << std::right;
    out_ << "streams written to " << output_dir_.string() << "/compare_*.jsonl\n";
    return all_ok ? exit_ok : exit_runtime;
}

int Cli::serve(std::vector<std::string> &args) {
    CLI::App app{"Serve the session API", "serve"};
    ServerOptions opts;
    app.add_option("--port", opts.port, "TCP port (0 picks one)");
    app.add_option("--host", opts.host, "bind address");
    parse_words(app, args, out_);

    Server server(opts);
    const int port = server.start();
    out_ << "listening on http://" << opts.host << ":" << port << std::endl;
    g_interrupted = false;
    auto prev_int = std::signal(SIGINT, on_signal);
    auto prev_term = std::signal(SIGTERM, on_signal);
    while (!g_interrupted)
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
    std::signal(SIGINT, prev_int);
    std::signal(SIGTERM, prev_term);
    server.stop();
    out_ << "stopped\n";
    return exit_ok;
}

int Cli::help() {
    out_ << "commands:\n"
            "  runvqe <qubo.csv> [conf.json] [--optimizer k] [--iterations n] "
            "[--seed s]\n"
            "  play <additive|inharmonic|subtractive|arpeggio> [--frame-dur s] "
            "[--out path]\n"
            "  oracle <qubo.csv>\n"
            "  compare-optimizers <qubo.csv> [conf.json]\n"
            "  serve [--port p] [--host h]\n"
            "  help, quit\n"
            "outputs go to $VQH_OUTPUT_DIR (currently "
         << output_dir_.string() << ")\n";
    return exit_ok;
}

int Cli::repl(std::istream &in, bool prompt) {
    int code = exit_ok;
    std::string line;
    while (true) {
        if (prompt)
            out_ << "vqh> " << std::flush;
        if (!std::getline(in, line))
            break;
        std::vector<std::string> words;
        try {
            words = split_command_line(line);
        } catch (const vqh::ParseError &e) {
            err_ << "error: " << e.what() << "\n";
            code = exit_usage;
            continue;
        }
        if (words.empty() || words.front().starts_with('#'))
            continue;
        if (words.front() == "quit" || words.front() == "exit")
            break;
        code = execute(std::move(words));
    }
    return code;
}

int cli_main(int argc, char **argv) {
    Cli cli(std::cout, std::cerr);
    if (argc > 1)
        return cli.execute(std::vector<std::string>(argv + 1, argv + argc));
    return cli.repl(std::cin, isatty(STDIN_FILENO) != 0);
}

} // namespace vqh
