#pragma once
// File-coupled pipeline stages with a JSON-lines run manifest.
//
// Every stage hashes its inputs, runs, hashes its outputs and appends one
// manifest line {"stage", "inputs", "config_hash", "outputs", "wall_ms"} to
// manifest.jsonl in the directory of its primary output. Artifacts produced
// by earlier stages are checked up front; a missing one raises
// DependencyError naming the file and the stage that makes it.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kbfresh {

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

struct PredRecord {
    std::string id;
    double score = 0.0;
    int label = 0;
};
void save_preds(const std::vector<PredRecord>& preds, const std::string& path);
std::vector<PredRecord> load_preds(const std::string& path);

// metrics.json is a single flat JSON object; eval writes the first eight
// keys, eval-kl merges kl_bits and kl_count_scaled into the same file.
void merge_metrics(const std::map<std::string, double>& values, const std::string& path);
std::map<std::string, double> load_metrics(const std::string& path);

struct ExtractSeedsArgs {
    std::string log, kb, out;
    std::size_t n_max = 4;
    std::size_t max_dist = 2;
};
void stage_extract_seeds(const ExtractSeedsArgs& args);

struct TopicsArgs {
    std::string kb, out, sse_csv, vocab_out;
    std::string k = "14";  // a positive integer, or "auto" for elbow selection
    std::size_t k_min = 2;
    std::size_t k_max = 20;
    std::uint64_t seed = 0;
    std::optional<std::size_t> batch_size;
};
void stage_topics(const TopicsArgs& args);

struct BuildGraphsArgs {
    std::string seeds, source, topics, vocab, out;
    std::string window;  // "start..end", ISO-8601 bounds
    bool include_topic = true;
    double max_failure_rate = 0.2;
};
void stage_build_graphs(const BuildGraphsArgs& args);

struct TrainArgs {
    std::string graphs, out_model, out_curves;
    double learning_rate = 0.01;
    int epochs = 25;
    std::uint64_t seed = 0;
    double threshold = 0.5;
};
void stage_train(const TrainArgs& args);

struct PredictArgs {
    std::string graphs, model, out;
    double threshold = 0.5;
    std::size_t jobs = 1;
};
void stage_predict(const PredictArgs& args);

struct SyncArgs {
    std::string kb, preds, source, report, out;
    bool dry_run = false;
    std::size_t max_dist = 2;
};
void stage_sync(const SyncArgs& args);

struct EvalArgs {
    std::string preds, labels, out;  // labels = graphs.jsonl
};
void stage_eval(const EvalArgs& args);

struct EvalKlArgs {
    std::string p_seeds, q_preds, topics, out;  // out = metrics.json to merge into
};
void stage_eval_kl(const EvalKlArgs& args);

struct ReportArgs {
    std::string dir;  // directory holding manifest.jsonl and metrics.json
    std::string out;  // report.txt
};
void stage_report(const ReportArgs& args);

struct RunConfig {
    std::string log, kb, source, out_dir = ".";
    std::uint64_t seed = 0;
    std::size_t n_max = 4;
    std::size_t max_dist = 2;
    std::string k = "14";
    std::size_t k_min = 2;
    std::size_t k_max = 20;
    std::string window;
    int epochs = 25;
    double learning_rate = 0.01;
    double threshold = 0.5;
    std::size_t jobs = 1;
    bool dry_run = false;
    bool include_topic = true;
};

// All stages in order against canonical artifact names inside out_dir.
void run_all(const RunConfig& config);

}  // namespace kbfresh
