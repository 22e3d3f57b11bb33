#include "kbfresh/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "json.hpp"
#include "kbfresh/encyc.hpp"
#include "kbfresh/error.hpp"
#include "kbfresh/graph_build.hpp"
#include "kbfresh/ingest.hpp"
#include "kbfresh/jsonl.hpp"
#include "kbfresh/kb_model.hpp"
#include "kbfresh/metrics.hpp"
#include "kbfresh/parallel.hpp"
#include "kbfresh/predictor.hpp"
#include "kbfresh/sync.hpp"
#include "kbfresh/topic.hpp"

namespace kbfresh {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for hashing: " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string basename_of(const std::string& path) { return fs::path(path).filename().string(); }

const std::map<std::string, std::string>& artifact_producers() {
    static const std::map<std::string, std::string> map = {
        {"seeds.jsonl", "extract-seeds"}, {"topics.jsonl", "topics"},
        {"vocab.jsonl", "topics"},        {"sse.csv", "topics"},
        {"graphs.jsonl", "build-graphs"}, {"model.json", "train"},
        {"curves.csv", "train"},          {"preds.jsonl", "predict"},
        {"metrics.json", "eval"},         {"report.jsonl", "sync"},
        {"kb_updated.jsonl", "sync"},     {"manifest.jsonl", "any pipeline stage"},
    };
    return map;
}

// Pipeline artifact expected from an earlier stage.
void require_artifact(const std::string& path) {
    if (fs::exists(path)) return;
    std::string msg = "missing artifact: " + path;
    auto it = artifact_producers().find(basename_of(path));
    if (it != artifact_producers().end()) {
        msg += " (produced by `kbfresh " + it->second + "`)";
    }
    throw DependencyError(msg);
}

class StageRecorder {
  public:
    StageRecorder(std::string stage, const std::string& primary_output)
        : stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {
        const fs::path dir = fs::path(primary_output).parent_path();
        manifest_path_ = (dir / "manifest.jsonl").string();
    }

    void input(const std::string& path) {
        inputs_[basename_of(path)] = hash_hex(fnv1a64_file(path));
    }
    void config(const std::string& key, const std::string& value) {
        config_ += key + "=" + value + ";";
    }
    void output(const std::string& path) { output_paths_.push_back(path); }

    void finish() {
        json j;
        j["stage"] = stage_;
        j["inputs"] = inputs_;
        j["config_hash"] = hash_hex(fnv1a64(config_));
        json outputs = json::object();
        for (const auto& path : output_paths_) {
            outputs[basename_of(path)] = hash_hex(fnv1a64_file(path));
        }
        j["outputs"] = std::move(outputs);
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        j["wall_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
        std::ofstream out(manifest_path_, std::ios::app);
        if (!out) throw IoError("cannot append to " + manifest_path_);
        out << j.dump() << '\n';
    }

  private:
    std::string stage_;
    std::string manifest_path_;
    std::chrono::steady_clock::time_point start_;
    std::map<std::string, std::string> inputs_;
    std::string config_;
    std::vector<std::string> output_paths_;
};

// Hash a dump-file source as an input; URLs go into the config string.
void record_source(StageRecorder& rec, const std::string& source) {
    if (source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0) {
        rec.config("source", source);
    } else {
        rec.input(source);
    }
}

}  // namespace

void save_preds(const std::vector<PredRecord>& preds, const std::string& path) {
    auto out = open_output(path);
    for (const auto& p : preds) {
        json j;
        j["id"] = p.id;
        j["score"] = p.score;
        j["label"] = p.label;
        out << j.dump() << '\n';
    }
}

std::vector<PredRecord> load_preds(const std::string& path) {
    std::vector<PredRecord> preds;
    for_each_line(path, [&](std::size_t lineno, const std::string& line) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string() ||
            !j.contains("score") || !j["score"].is_number() || !j.contains("label") ||
            !j["label"].is_number_integer()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad prediction record");
        }
        preds.push_back(PredRecord{j["id"].get<std::string>(), j["score"].get<double>(),
                                   j["label"].get<int>()});
    });
    return preds;
}

void merge_metrics(const std::map<std::string, double>& values, const std::string& path) {
    json j = json::object();
    if (fs::exists(path)) {
        auto in = open_input(path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParseError(path + ": bad metrics JSON: " + e.what());
        }
        if (!j.is_object()) throw ParseError(path + ": metrics file is not a JSON object");
    }
    for (const auto& [key, value] : values) j[key] = value;
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

std::map<std::string, double> load_metrics(const std::string& path) {
    auto in = open_input(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": bad metrics JSON: " + e.what());
    }
    if (!j.is_object()) throw ParseError(path + ": metrics file is not a JSON object");
    std::map<std::string, double> out;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number()) throw ParseError(path + ": metric " + key + " is not a number");
        out[key] = value.get<double>();
    }
    return out;
}

void stage_extract_seeds(const ExtractSeedsArgs& args) {
    StageRecorder rec("extract-seeds", args.out);
    rec.input(args.log);
    rec.input(args.kb);
    rec.config("nmax", std::to_string(args.n_max));
    rec.config("max-dist", std::to_string(args.max_dist));

    const KnowledgeBase kb = load_kb(args.kb);
    const std::vector<QuerySentence> log = load_log(args.log);
    ExtractConfig config;
    config.n_max = args.n_max;
    config.max_dist = args.max_dist;
    const std::vector<SeedEntity> seeds = extract_seeds(log, kb, config);
    save_seeds(seeds, args.out);

    rec.output(args.out);
    rec.finish();
}

void stage_topics(const TopicsArgs& args) {
    StageRecorder rec("topics", args.out);
    rec.input(args.kb);
    rec.config("k", args.k);
    rec.config("k-min", std::to_string(args.k_min));
    rec.config("k-max", std::to_string(args.k_max));
    rec.config("seed", std::to_string(args.seed));
    if (args.batch_size) rec.config("batch-size", std::to_string(*args.batch_size));

    const KnowledgeBase kb = load_kb(args.kb);
    std::vector<std::pair<std::string, std::string>> id_text;
    id_text.reserve(kb.entities.size());
    for (const auto& e : kb.entities) id_text.emplace_back(e.id, e.summary);
    std::sort(id_text.begin(), id_text.end());  // canonical point order

    auto [points, vocab] = embed_corpus(id_text);

    std::size_t k = 0;
    std::vector<std::pair<std::size_t, double>> series;
    if (args.k == "auto") {
        std::set<std::vector<double>> distinct(points.begin(), points.end());
        const std::size_t k_max = std::min(args.k_max, distinct.size());
        if (k_max < args.k_min || k_max - args.k_min + 1 < 3) {
            throw ParameterError("k range " + std::to_string(args.k_min) + ".." +
                                 std::to_string(k_max) +
                                 " too narrow for elbow selection (need 3 values)");
        }
        ElbowResult elbow = choose_k(points, args.k_min, k_max, args.seed);
        k = elbow.k;
        series = std::move(elbow.sse_series);
    } else {
        try {
            std::size_t pos = 0;
            const long long parsed = std::stoll(args.k, &pos);
            if (pos != args.k.size() || parsed < 1) throw std::invalid_argument(args.k);
            k = static_cast<std::size_t>(parsed);
        } catch (const std::exception&) {
            throw ParameterError("k must be \"auto\" or a positive integer, got: " + args.k);
        }
    }

    const ClusterModel model = kmeans(points, k, args.seed, args.batch_size);
    if (args.k != "auto") series.emplace_back(k, sse(points, model));

    std::map<std::string, std::size_t> assignments;
    for (std::size_t i = 0; i < id_text.size(); ++i) {
        assignments[id_text[i].first] = model.point_assignments[i];
    }
    save_topics(assignments, args.out);
    save_sse_csv(series, args.sse_csv);
    save_vocabulary(vocab.with_reserved_topics(k), args.vocab_out);

    rec.output(args.out);
    rec.output(args.sse_csv);
    rec.output(args.vocab_out);
    rec.finish();
}

void stage_build_graphs(const BuildGraphsArgs& args) {
    require_artifact(args.seeds);
    require_artifact(args.topics);
    require_artifact(args.vocab);
    if (args.window.empty()) throw ParameterError("--window is required (start..end)");
    const LabelWindow window = parse_window(args.window);

    StageRecorder rec("build-graphs", args.out);
    rec.input(args.seeds);
    rec.input(args.topics);
    rec.input(args.vocab);
    record_source(rec, args.source);
    rec.config("window", args.window);
    rec.config("include-topic", args.include_topic ? "1" : "0");

    const std::vector<SeedEntity> seeds = load_seeds(args.seeds);
    const std::map<std::string, int> topics = load_topics(args.topics);
    GraphBuildConfig config;
    config.vocabulary = load_vocabulary(args.vocab);
    config.include_topic_node = args.include_topic;
    config.max_failure_rate = args.max_failure_rate;
    auto source = open_source(args.source);

    const DatasetReport report = build_dataset(seeds, *source, topics, {window}, config);
    for (const auto& [id, reason] : report.skipped) {
        std::cerr << "build-graphs: skipped " << id << ": " << reason << '\n';
    }
    save_graphs(report.graphs, config.vocabulary.size(), args.out);

    rec.output(args.out);
    rec.finish();
}

void stage_train(const TrainArgs& args) {
    require_artifact(args.graphs);
    StageRecorder rec("train", args.out_model);
    rec.input(args.graphs);
    rec.config("learning-rate", std::to_string(args.learning_rate));
    rec.config("epochs", std::to_string(args.epochs));
    rec.config("seed", std::to_string(args.seed));
    rec.config("threshold", std::to_string(args.threshold));

    const GraphStore store = load_graphs(args.graphs);
    TrainConfig config;
    config.learning_rate = args.learning_rate;
    config.epochs = args.epochs;
    config.seed = args.seed;
    config.threshold = args.threshold;
    const TrainResult result = train(store.graphs, config);
    save_model(result.params, args.out_model);
    save_curves(result.curves, args.out_curves);

    rec.output(args.out_model);
    rec.output(args.out_curves);
    rec.finish();
}

void stage_predict(const PredictArgs& args) {
    require_artifact(args.graphs);
    require_artifact(args.model);
    StageRecorder rec("predict", args.out);
    rec.input(args.graphs);
    rec.input(args.model);
    rec.config("threshold", std::to_string(args.threshold));

    const GraphStore store = load_graphs(args.graphs);
    const GcnParams params = load_model(args.model);
    std::vector<PredRecord> preds(store.graphs.size());
    parallel_for(store.graphs.size(), args.jobs, [&](std::size_t i) {
        const Prediction p = predict(store.graphs[i], params, args.threshold);
        preds[i] = PredRecord{store.graphs[i].entity_id, p.score, p.label};
    });
    save_preds(preds, args.out);

    rec.output(args.out);
    rec.finish();
}

void stage_sync(const SyncArgs& args) {
    require_artifact(args.preds);
    StageRecorder rec("sync", args.out);
    rec.input(args.kb);
    rec.input(args.preds);
    record_source(rec, args.source);
    rec.config("dry-run", args.dry_run ? "1" : "0");
    rec.config("max-dist", std::to_string(args.max_dist));

    const KnowledgeBase kb = load_kb(args.kb);
    const std::vector<PredRecord> preds = load_preds(args.preds);
    std::vector<std::pair<std::string, int>> predictions;
    predictions.reserve(preds.size());
    for (const auto& p : preds) predictions.emplace_back(p.id, p.label);
    auto source = open_source(args.source);

    SyncConfig config;
    config.max_dist = args.max_dist;
    config.dry_run = args.dry_run;
    const SyncResult result = sync_pipeline(kb, predictions, *source, config);
    save_reports(result.reports, args.report);
    save_kb(result.kb, args.out);

    rec.output(args.report);
    rec.output(args.out);
    rec.finish();
}

void stage_eval(const EvalArgs& args) {
    require_artifact(args.preds);
    require_artifact(args.labels);
    StageRecorder rec("eval", args.out);
    rec.input(args.preds);
    rec.input(args.labels);

    const std::vector<PredRecord> preds = load_preds(args.preds);
    const GraphStore store = load_graphs(args.labels);
    if (preds.size() != store.graphs.size()) {
        throw ValidationError("prediction count " + std::to_string(preds.size()) +
                              " does not match graph count " +
                              std::to_string(store.graphs.size()));
    }
    std::vector<double> scores;
    std::vector<int> pred_labels, truth;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].id != store.graphs[i].entity_id) {
            throw ValidationError("prediction " + std::to_string(i + 1) + " is for " +
                                  preds[i].id + " but graph holds " +
                                  store.graphs[i].entity_id);
        }
        scores.push_back(preds[i].score);
        pred_labels.push_back(preds[i].label);
        truth.push_back(store.graphs[i].label);
    }

    const PrfResult r = prf(pred_labels, truth);
    std::map<std::string, double> metrics = {
        {"mse", mse(scores, truth)},        {"auc", auc(scores, truth)},
        {"precision_uc", r.precision_uc},   {"recall_uc", r.recall_uc},
        {"f1_uc", r.f1_uc},                 {"precision_c", r.precision_c},
        {"recall_c", r.recall_c},           {"f1_c", r.f1_c},
    };
    merge_metrics(metrics, args.out);

    rec.output(args.out);
    rec.finish();
}

void stage_eval_kl(const EvalKlArgs& args) {
    require_artifact(args.p_seeds);
    require_artifact(args.q_preds);
    require_artifact(args.topics);
    StageRecorder rec("eval-kl", args.out);
    rec.input(args.p_seeds);
    rec.input(args.q_preds);
    rec.input(args.topics);

    const std::vector<SeedEntity> seeds = load_seeds(args.p_seeds);
    const std::vector<PredRecord> preds = load_preds(args.q_preds);
    const std::map<std::string, int> topics = load_topics(args.topics);

    auto topic_of = [&](const std::string& id) {
        auto it = topics.find(id);
        if (it == topics.end()) throw ValidationError("no topic assignment for entity " + id);
        return it->second;
    };
    std::vector<int> p_topics;
    for (const auto& s : seeds) p_topics.push_back(topic_of(s.entity_id));
    std::vector<int> q_topics;
    std::set<std::string> seen;
    for (const auto& p : preds) {
        if (p.label == 1 && seen.insert(p.id).second) q_topics.push_back(topic_of(p.id));
    }

    const TopicDistribution P = topic_distribution(p_topics);
    const TopicDistribution Q = topic_distribution(q_topics);
    merge_metrics({{"kl_bits", kl_divergence_bits(P, Q)},
                   {"kl_count_scaled", kl_count_scaled(P, Q)}},
                  args.out);

    rec.output(args.out);
    rec.finish();
}

namespace {

struct ManifestRow {
    std::string stage;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    std::string config_hash;
};

// Last entry per stage wins (re-runs supersede earlier lines).
std::map<std::string, ManifestRow> read_manifest(const std::string& path) {
    std::map<std::string, ManifestRow> rows;
    for_each_line(path, [&](std::size_t lineno, const std::string& line) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("stage")) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad manifest line");
        }
        ManifestRow row;
        row.stage = j["stage"].get<std::string>();
        if (j.contains("inputs")) {
            for (const auto& [k, v] : j["inputs"].items()) row.inputs[k] = v.get<std::string>();
        }
        if (j.contains("outputs")) {
            for (const auto& [k, v] : j["outputs"].items()) row.outputs[k] = v.get<std::string>();
        }
        if (j.contains("config_hash")) row.config_hash = j["config_hash"].get<std::string>();
        rows[row.stage] = std::move(row);
    });
    return rows;
}

}  // namespace

void stage_report(const ReportArgs& args) {
    const std::string manifest_path = (fs::path(args.dir) / "manifest.jsonl").string();
    if (!fs::exists(manifest_path)) {
        throw DependencyError("missing artifact: " + manifest_path +
                              " (produced by any pipeline stage)");
    }
    const auto rows = read_manifest(manifest_path);

    auto out = open_output(args.out);
    out << "pipeline report\n";
    out << "===============\n";
    static const char* kStageOrder[] = {"extract-seeds", "topics", "build-graphs",
                                        "train",         "predict", "sync",
                                        "eval",          "eval-kl"};
    for (const char* stage : kStageOrder) {
        auto it = rows.find(stage);
        if (it == rows.end()) continue;
        out << "\n[" << stage << "] config " << it->second.config_hash << '\n';
        for (const auto& [name, hash] : it->second.inputs) {
            out << "  in  " << name << ' ' << hash << '\n';
        }
        for (const auto& [name, hash] : it->second.outputs) {
            out << "  out " << name << ' ' << hash << '\n';
        }
    }

    out << "\nmetrics\n";
    const std::string metrics_path = (fs::path(args.dir) / "metrics.json").string();
    if (fs::exists(metrics_path)) {
        for (const auto& [key, value] : load_metrics(metrics_path)) {
            out << "  " << key << " = " << json(value).dump() << '\n';
        }
    } else {
        out << "  (missing: run `kbfresh eval` and `kbfresh eval-kl`)\n";
    }

    out << "\nplot series\n";
    for (const char* name : {"sse.csv", "curves.csv"}) {
        const std::string path = (fs::path(args.dir) / name).string();
        out << "  " << name << (fs::exists(path) ? "" : " (missing)") << '\n';
    }
}

void run_all(const RunConfig& config) {
    if (config.kb.empty()) throw ParameterError("kb path is required");
    if (config.log.empty()) throw ParameterError("log path is required");
    if (config.window.empty()) throw ParameterError("window is required (start..end)");
    const std::string source = config.source.empty() ? config.kb : config.source;
    fs::create_directories(config.out_dir);
    auto in_dir = [&](const char* name) { return (fs::path(config.out_dir) / name).string(); };

    ExtractSeedsArgs seeds;
    seeds.log = config.log;
    seeds.kb = config.kb;
    seeds.out = in_dir("seeds.jsonl");
    seeds.n_max = config.n_max;
    seeds.max_dist = config.max_dist;
    stage_extract_seeds(seeds);

    TopicsArgs topics;
    topics.kb = config.kb;
    topics.out = in_dir("topics.jsonl");
    topics.sse_csv = in_dir("sse.csv");
    topics.vocab_out = in_dir("vocab.jsonl");
    topics.k = config.k;
    topics.k_min = config.k_min;
    topics.k_max = config.k_max;
    topics.seed = config.seed;
    stage_topics(topics);

    BuildGraphsArgs graphs;
    graphs.seeds = seeds.out;
    graphs.source = source;
    graphs.topics = topics.out;
    graphs.vocab = topics.vocab_out;
    graphs.out = in_dir("graphs.jsonl");
    graphs.window = config.window;
    graphs.include_topic = config.include_topic;
    stage_build_graphs(graphs);

    TrainArgs train_args;
    train_args.graphs = graphs.out;
    train_args.out_model = in_dir("model.json");
    train_args.out_curves = in_dir("curves.csv");
    train_args.learning_rate = config.learning_rate;
    train_args.epochs = config.epochs;
    train_args.seed = config.seed;
    train_args.threshold = config.threshold;
    stage_train(train_args);

    PredictArgs predict_args;
    predict_args.graphs = graphs.out;
    predict_args.model = train_args.out_model;
    predict_args.out = in_dir("preds.jsonl");
    predict_args.threshold = config.threshold;
    predict_args.jobs = config.jobs;
    stage_predict(predict_args);

    SyncArgs sync_args;
    sync_args.kb = config.kb;
    sync_args.preds = predict_args.out;
    sync_args.source = source;
    sync_args.report = in_dir("report.jsonl");
    sync_args.out = in_dir("kb_updated.jsonl");
    sync_args.dry_run = config.dry_run;
    sync_args.max_dist = config.max_dist;
    stage_sync(sync_args);

    EvalArgs eval_args;
    eval_args.preds = predict_args.out;
    eval_args.labels = graphs.out;
    eval_args.out = in_dir("metrics.json");
    stage_eval(eval_args);

    EvalKlArgs kl_args;
    kl_args.p_seeds = seeds.out;
    kl_args.q_preds = predict_args.out;
    kl_args.topics = topics.out;
    kl_args.out = eval_args.out;
    stage_eval_kl(kl_args);

    ReportArgs report_args;
    report_args.dir = config.out_dir;
    report_args.out = in_dir("report.txt");
    stage_report(report_args);
}

}  // namespace kbfresh
