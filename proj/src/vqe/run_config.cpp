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

#include "vqh/run_config.hpp"

#include <fstream>
#include <sstream>

namespace vqh {

using nlohmann::json;

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error([&] {
          std::string msg = "invalid run configuration";
          for (const auto &issue : issues)
              msg += "\n  " + issue;
          return msg;
      }()),
      issues_(std::move(issues)) {}

namespace {

class Reader {
  public:
    std::vector<std::string> issues;

    void issue(const std::string &field, const std::string &problem) {
        issues.push_back(field + ": " + problem);
    }

    void check_keys(const json &obj, const std::string &where,
                    std::initializer_list<const char *> allowed) {
        for (const auto &[key, _] : obj.items()) {
            bool ok = false;
            for (const char *a : allowed)
                ok = ok || key == a;
            if (!ok)
                issue(where.empty() ? key : where + "." + key, "unknown key");
        }
    }

    template <class T>
    std::optional<T> count(const json &obj, const char *key,
                           const std::string &field, std::uint64_t minimum) {
        if (!obj.contains(key))
            return std::nullopt;
        const auto &v = obj.at(key);
        if (!v.is_number_integer() ||
            (v.is_number_integer() && v.get<std::int64_t>() < 0)) {
            issue(field, "expected a non-negative integer");
            return std::nullopt;
        }
        const auto value = v.get<std::uint64_t>();
        if (value < minimum) {
            issue(field, "must be at least " + std::to_string(minimum));
            return std::nullopt;
        }
        return static_cast<T>(value);
    }

    std::optional<double> real(const json &obj, const char *key,
                               const std::string &field) {
        if (!obj.contains(key))
            return std::nullopt;
        const auto &v = obj.at(key);
        if (!v.is_number()) {
            issue(field, "expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::string> text(const json &obj, const char *key,
                                    const std::string &field) {
        if (!obj.contains(key))
            return std::nullopt;
        const auto &v = obj.at(key);
        if (!v.is_string()) {
            issue(field, "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    bool object(const json &obj, const std::string &field) {
        if (!obj.is_object()) {
            issue(field, "expected an object");
            return false;
        }
        return true;
    }
};

void read_optimizer(Reader &r, const json &doc, OptimizerConfig &opt) {
    if (!r.object(doc, "optimizer"))
        return;
    r.check_keys(doc, "optimizer", {"kind", "seed", "hyperparameters"});
    if (auto kind = r.text(doc, "kind", "optimizer.kind")) {
        try {
            opt.kind = parse_optimizer_kind(*kind);
        } catch (const Error &e) {
            r.issue("optimizer.kind", e.what());
        }
    }
    if (auto seed = r.count<std::uint64_t>(doc, "seed", "optimizer.seed", 0))
        opt.seed = *seed;
    if (!doc.contains("hyperparameters"))
        return;
    const auto &hp = doc.at("hyperparameters");
    if (!r.object(hp, "optimizer.hyperparameters"))
        return;
    const std::string where = "optimizer.hyperparameters";
    auto set = [&](const char *key, double &target) {
        if (auto v = r.real(hp, key, where + "." + key))
            target = *v;
    };
    switch (opt.kind) {
    case OptimizerKind::spsa:
        r.check_keys(hp, where, {"a", "c", "stability", "alpha", "gamma"});
        set("a", opt.spsa.a);
        set("c", opt.spsa.c);
        set("stability", opt.spsa.stability);
        set("alpha", opt.spsa.alpha);
        set("gamma", opt.spsa.gamma);
        break;
    case OptimizerKind::nft:
        r.check_keys(hp, where, {"sweep_order", "degenerate_tolerance"});
        set("degenerate_tolerance", opt.nft.degenerate_tolerance);
        if (hp.contains("sweep_order")) {
            const auto &order = hp.at("sweep_order");
            if (!order.is_array()) {
                r.issue(where + ".sweep_order", "expected an array");
            } else {
                for (const auto &k : order) {
                    if (!k.is_number_unsigned()) {
                        r.issue(where + ".sweep_order",
                                "entries must be non-negative integers");
                        break;
                    }
                    opt.nft.sweep_order.push_back(k.get<std::size_t>());
                }
            }
        }
        break;
    case OptimizerKind::cobyla_like:
        r.check_keys(hp, where,
                     {"initial_step", "reflection", "expansion", "contraction",
                      "shrink", "tolerance"});
        set("initial_step", opt.simplex.initial_step);
        set("reflection", opt.simplex.reflection);
        set("expansion", opt.simplex.expansion);
        set("contraction", opt.simplex.contraction);
        set("shrink", opt.simplex.shrink);
        set("tolerance", opt.simplex.tolerance);
        break;
    }
    try {
        opt.validate();
    } catch (const Error &e) {
        r.issue(where, e.what());
    }
}

void read_segment(Reader &r, const json &seg, const std::string &where,
                  SegmentSource &out) {
    if (!r.object(seg, where))
        return;
    r.check_keys(seg, where,
                 {"qubo", "qubo_csv", "chord", "encoding", "boundary",
                  "iterations", "label"});
    out.qubo_path = r.text(seg, "qubo", where + ".qubo");
    out.qubo_csv = r.text(seg, "qubo_csv", where + ".qubo_csv");
    out.iterations = r.count<std::size_t>(seg, "iterations",
                                          where + ".iterations", 1);
    if (auto label = r.text(seg, "label", where + ".label"))
        out.label = *label;
    if (seg.contains("chord")) {
        ChordSource chord;
        const auto &notes = seg.at("chord");
        if (!notes.is_array()) {
            r.issue(where + ".chord", "expected an array of note labels");
        } else {
            for (const auto &n : notes) {
                if (!n.is_string()) {
                    r.issue(where + ".chord", "note labels must be strings");
                    break;
                }
                chord.notes.push_back(n.get<std::string>());
            }
        }
        try {
            if (auto e = r.text(seg, "encoding", where + ".encoding"))
                chord.encoding = parse_chord_encoding(*e);
            if (auto b = r.text(seg, "boundary", where + ".boundary"))
                chord.boundary = parse_boundary(*b);
        } catch (const Error &e) {
            r.issue(where, e.what());
        }
        out.chord = std::move(chord);
    } else if (seg.contains("encoding") || seg.contains("boundary")) {
        r.issue(where, "encoding/boundary require a chord");
    }
    const int sources = int(out.qubo_path.has_value()) +
                        int(out.qubo_csv.has_value()) +
                        int(out.chord.has_value());
    if (sources > 1)
        r.issue(where, "give at most one of qubo, qubo_csv, chord");
}

} // namespace

RunConfig parse_run_config(const json &doc) {
    Reader r;
    RunConfig cfg;
    if (!doc.is_object())
        throw ValidationError({"(root): expected a JSON object"});
    r.check_keys(doc, "",
                 {"iterations", "optimizer", "ansatz", "shots", "initial",
                  "schedule", "frame_duration"});

    if (auto it = r.count<std::size_t>(doc, "iterations", "iterations", 1))
        cfg.iterations = *it;

    if (doc.contains("optimizer"))
        read_optimizer(r, doc.at("optimizer"), cfg.optimizer);

    if (doc.contains("ansatz") && r.object(doc.at("ansatz"), "ansatz")) {
        const auto &a = doc.at("ansatz");
        r.check_keys(a, "ansatz", {"reps", "entanglement"});
        if (auto reps = r.count<std::size_t>(a, "reps", "ansatz.reps", 0))
            cfg.reps = *reps;
        if (a.contains("entanglement")) {
            const auto &e = a.at("entanglement");
            if (e.is_string()) {
                if (e.get<std::string>() != "linear")
                    r.issue("ansatz.entanglement",
                            "expected \"linear\" or a list of [control, "
                            "target] pairs");
            } else if (e.is_array()) {
                std::vector<std::pair<std::size_t, std::size_t>> pairs;
                for (const auto &p : e) {
                    if (!p.is_array() || p.size() != 2 ||
                        !p[0].is_number_unsigned() ||
                        !p[1].is_number_unsigned()) {
                        r.issue("ansatz.entanglement",
                                "pairs must be [control, target] with "
                                "non-negative integers");
                        break;
                    }
                    pairs.emplace_back(p[0].get<std::size_t>(),
                                       p[1].get<std::size_t>());
                }
                cfg.entanglement = std::move(pairs);
            } else {
                r.issue("ansatz.entanglement", "expected string or array");
            }
        }
    }

    if (doc.contains("shots") && !doc.at("shots").is_null())
        cfg.shots = r.count<std::uint64_t>(doc, "shots", "shots", 1);

    if (doc.contains("initial") && r.object(doc.at("initial"), "initial")) {
        const auto &init = doc.at("initial");
        r.check_keys(init, "initial", {"mode", "seed"});
        if (auto mode = r.text(init, "mode", "initial.mode")) {
            if (*mode == "zeros")
                cfg.initial = InitialMode::zeros;
            else if (*mode == "random")
                cfg.initial = InitialMode::random;
            else
                r.issue("initial.mode", "expected \"zeros\" or \"random\"");
        }
        if (auto seed =
                r.count<std::uint64_t>(init, "seed", "initial.seed", 0))
            cfg.initial_seed = *seed;
    }

    if (doc.contains("schedule") && r.object(doc.at("schedule"), "schedule")) {
        const auto &s = doc.at("schedule");
        r.check_keys(s, "schedule", {"mode", "segments", "adiabatic_steps"});
        if (auto mode = r.text(s, "mode", "schedule.mode")) {
            if (*mode == "sequential")
                cfg.mode = ScheduleMode::sequential;
            else if (*mode == "adiabatic")
                cfg.mode = ScheduleMode::adiabatic;
            else
                r.issue("schedule.mode",
                        "expected \"sequential\" or \"adiabatic\"");
        }
        if (auto m = r.count<std::size_t>(s, "adiabatic_steps",
                                          "schedule.adiabatic_steps", 1))
            cfg.adiabatic_steps = *m;
        if (s.contains("segments")) {
            const auto &segs = s.at("segments");
            if (!segs.is_array() || segs.empty()) {
                r.issue("schedule.segments", "expected a non-empty array");
            } else {
                for (std::size_t i = 0; i < segs.size(); ++i) {
                    SegmentSource src;
                    read_segment(r, segs[i],
                                 "schedule.segments[" + std::to_string(i) + "]",
                                 src);
                    cfg.segments.push_back(std::move(src));
                }
            }
        }
    }

    if (auto fd = r.real(doc, "frame_duration", "frame_duration")) {
        if (!(*fd > 0.0))
            r.issue("frame_duration", "must be positive");
        else
            cfg.frame_duration = *fd;
    }

    if (!r.issues.empty())
        throw ValidationError(std::move(r.issues));
    return cfg;
}

RunConfig load_run_config(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open configuration file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ParseError(path + ": " + e.what());
    }
    return parse_run_config(doc);
}

json to_json(const RunConfig &cfg) {
    json doc;
    doc["iterations"] = cfg.iterations;
    json opt;
    opt["kind"] = std::string(to_string(cfg.optimizer.kind));
    opt["seed"] = cfg.optimizer.seed;
    switch (cfg.optimizer.kind) {
    case OptimizerKind::spsa:
        opt["hyperparameters"] = {{"a", cfg.optimizer.spsa.a},
                                  {"c", cfg.optimizer.spsa.c},
                                  {"stability", cfg.optimizer.spsa.stability},
                                  {"alpha", cfg.optimizer.spsa.alpha},
                                  {"gamma", cfg.optimizer.spsa.gamma}};
        break;
    case OptimizerKind::nft:
        opt["hyperparameters"] = {
            {"sweep_order", cfg.optimizer.nft.sweep_order},
            {"degenerate_tolerance", cfg.optimizer.nft.degenerate_tolerance}};
        break;
    case OptimizerKind::cobyla_like: {
        const auto &s = cfg.optimizer.simplex;
        opt["hyperparameters"] = {{"initial_step", s.initial_step},
                                  {"reflection", s.reflection},
                                  {"expansion", s.expansion},
                                  {"contraction", s.contraction},
                                  {"shrink", s.shrink},
                                  {"tolerance", s.tolerance}};
        break;
    }
    }
    doc["optimizer"] = opt;
    json ansatz;
    ansatz["reps"] = cfg.reps;
    if (cfg.entanglement) {
        ansatz["entanglement"] = json::array();
        for (const auto &[c, t] : *cfg.entanglement)
            ansatz["entanglement"].push_back({c, t});
    } else {
        ansatz["entanglement"] = "linear";
    }
    doc["ansatz"] = ansatz;
    if (cfg.shots)
        doc["shots"] = *cfg.shots;
    doc["initial"] = {{"mode", cfg.initial == InitialMode::zeros ? "zeros"
                                                                 : "random"},
                      {"seed", cfg.initial_seed}};
    doc["frame_duration"] = cfg.frame_duration;
    if (!cfg.segments.empty() || cfg.mode != ScheduleMode::sequential) {
        json sched;
        sched["mode"] =
            cfg.mode == ScheduleMode::sequential ? "sequential" : "adiabatic";
        sched["adiabatic_steps"] = cfg.adiabatic_steps;
        sched["segments"] = json::array();
        for (const auto &seg : cfg.segments) {
            json js = json::object();
            if (seg.qubo_path)
                js["qubo"] = *seg.qubo_path;
            if (seg.qubo_csv)
                js["qubo_csv"] = *seg.qubo_csv;
            if (seg.chord) {
                js["chord"] = seg.chord->notes;
                js["encoding"] =
                    seg.chord->encoding == ChordEncoding::linear    ? "linear"
                    : seg.chord->encoding == ChordEncoding::coupled ? "coupled"
                                                                    : "balanced";
                js["boundary"] = seg.chord->boundary == Boundary::open
                                     ? "open"
                                     : "periodic";
            }
            if (seg.iterations)
                js["iterations"] = *seg.iterations;
            if (!seg.label.empty())
                js["label"] = seg.label;
            sched["segments"].push_back(js);
        }
        doc["schedule"] = sched;
    }
    return doc;
}

PreparedRun prepare_run(const QuboProblem &base, const RunConfig &cfg,
                        const std::filesystem::path &config_dir,
                        bool allow_paths) {
    PreparedRun run;
    run.labels = base.labels();
    run.optimizer = cfg.optimizer;
    run.shots = cfg.shots;
    run.frame_duration = cfg.frame_duration;

    std::vector<std::string> issues;
    std::vector<SegmentSource> sources = cfg.segments;
    if (sources.empty())
        sources.push_back({});

    for (std::size_t i = 0; i < sources.size(); ++i) {
        const auto &src = sources[i];
        const std::string where = "schedule.segments[" + std::to_string(i) + "]";
        try {
            QuboProblem q = base;
            std::string label = src.label;
            if (src.qubo_path) {
                if (!allow_paths)
                    throw Error("file references are not accepted here");
                std::filesystem::path p(*src.qubo_path);
                if (p.is_relative())
                    p = config_dir / p;
                q = load_qubo_csv(p.string());
                if (label.empty())
                    label = src.qubo_path->c_str();
            } else if (src.qubo_csv) {
                q = parse_qubo_csv(*src.qubo_csv);
            } else if (src.chord) {
                ChordSpec spec{chord_notes(src.chord->notes, base.labels()),
                               src.chord->encoding, src.chord->boundary};
                if (auto w = chord_warning(spec))
                    run.warnings.push_back(where + ": " + *w);
                q = chord_qubo(spec, base.labels());
                if (label.empty()) {
                    for (const auto &n : src.chord->notes)
                        label += n;
                }
            }
            if (q.size() != base.size())
                throw DimensionError("segment has " + std::to_string(q.size()) +
                                     " notes, base QUBO has " +
                                     std::to_string(base.size()));
            if (label.empty())
                label = "segment" + std::to_string(i);
            run.schedule.segments.push_back(
                {qubo_to_ising(q), src.iterations.value_or(cfg.iterations),
                 label});
            run.problems.push_back(std::move(q));
        } catch (const Error &e) {
            issues.push_back(where + ": " + e.what());
        }
    }
    run.schedule.mode = cfg.mode;
    run.schedule.adiabatic_steps = cfg.adiabatic_steps;

    const std::size_t n = base.size();
    if (n < 1 || n > kMaxQubits)
        issues.push_back("qubo: " + std::to_string(n) +
                         " notes exceeds the simulator bound of " +
                         std::to_string(kMaxQubits));
    run.ansatz = AnsatzSpec::linear(n, cfg.reps);
    if (cfg.entanglement)
        run.ansatz.entanglement = *cfg.entanglement;
    try {
        if (issues.empty()) {
            run.ansatz.validate();
            run.schedule.validate();
        }
    } catch (const Error &e) {
        issues.push_back(std::string("schedule/ansatz: ") + e.what());
    }
    if (!issues.empty())
        throw ValidationError(std::move(issues));

    const std::size_t count = run.ansatz.parameter_count();
    run.initial = cfg.initial == InitialMode::zeros
                      ? ParameterVector::zeros(count)
                      : ParameterVector::random(count, cfg.initial_seed);
    return run;
}

RunResult execute(const PreparedRun &run, const RecordSink &sink,
                  std::stop_token stop) {
    EngineOptions options;
    options.shots = run.shots;
    options.shot_seed = run.optimizer.seed;
    options.stop = std::move(stop);
    return run_schedule(run.schedule, run.ansatz, run.optimizer, run.initial,
                        sink, options);
}

} // namespace vqh
