// Command-line front end; all real work lives in the pipeline stages.
// Exit codes: 0 ok, 1 usage, 2 data, 3 missing pipeline artifact.
//
// --config names a flat key=value file whose keys are the long flag names.
// It is expanded into arguments right after the subcommand token, so flags
// given on the command line always override file values (last one wins).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kbfresh/error.hpp"
#include "kbfresh/pipeline.hpp"
#include "kbfresh/text.hpp"

namespace {

int exit_code_for(const kbfresh::Error& e) {
    switch (e.kind()) {
        case kbfresh::ErrorKind::Usage: return 1;
        case kbfresh::ErrorKind::Data: return 2;
        case kbfresh::ErrorKind::Dependency: return 3;
        case kbfresh::ErrorKind::Internal: return 2;
    }
    return 2;
}

std::vector<std::string> read_config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw kbfresh::ParameterError("cannot open config file: " + path);
    std::vector<std::string> args;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = kbfresh::trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw kbfresh::ParameterError(path + ":" + std::to_string(lineno) +
                                          ": expected key=value");
        }
        const std::string key = kbfresh::trim(trimmed.substr(0, eq));
        std::string value = kbfresh::trim(trimmed.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (key.empty()) {
            throw kbfresh::ParameterError(path + ":" + std::to_string(lineno) + ": empty key");
        }
        args.push_back("--" + key + "=" + value);
    }
    return args;
}

// Pull every `--config <file>` / `--config=<file>` out of argv and splice the
// file's key=value pairs in right after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> injected;
    for (std::size_t i = 1; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            const auto file_args = read_config_args(args[i + 1]);
            injected.insert(injected.end(), file_args.begin(), file_args.end());
            args.erase(args.begin() + i, args.begin() + i + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            const auto file_args = read_config_args(args[i].substr(9));
            injected.insert(injected.end(), file_args.begin(), file_args.end());
            args.erase(args.begin() + i);
        } else {
            ++i;
        }
    }
    if (!args.empty() && !injected.empty()) {
        args.insert(args.begin() + 1, injected.begin(), injected.end());
    }
    return args;
}

void allow_config(CLI::App* cmd) {
    // parsed manually in expand_config; registered here for --help only
    static std::string ignored;
    cmd->add_option("--config", ignored, "key=value file; explicit flags override it");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"detect stale knowledge-base entities and refresh them"};
    app.require_subcommand(1);

    kbfresh::ExtractSeedsArgs seeds_args;
    auto* seeds = app.add_subcommand("extract-seeds", "mine queried entities from a log");
    allow_config(seeds);
    seeds->add_option("--log", seeds_args.log, "query log, jsonl or plain text")->required();
    seeds->add_option("--kb", seeds_args.kb, "knowledge base snapshot, jsonl")->required();
    seeds->add_option("--nmax", seeds_args.n_max, "longest n-gram to try");
    seeds->add_option("--max-dist", seeds_args.max_dist, "edit-distance cap for matches");
    seeds->add_option("--out", seeds_args.out, "seed list output, jsonl")->required();
    seeds->callback([&] { kbfresh::stage_extract_seeds(seeds_args); });

    kbfresh::TopicsArgs topics_args;
    auto* topics = app.add_subcommand("topics", "cluster entity summaries into topics");
    allow_config(topics);
    topics->add_option("--kb", topics_args.kb, "knowledge base snapshot, jsonl")->required();
    topics->add_option("--k", topics_args.k, "cluster count, or \"auto\" for elbow selection");
    topics->add_option("--k-min", topics_args.k_min, "smallest k tried when --k auto");
    topics->add_option("--k-max", topics_args.k_max, "largest k tried when --k auto");
    topics->add_option("--seed", topics_args.seed, "clustering rng seed");
    topics->add_option("--batch-size", topics_args.batch_size,
                       "mini-batch size (full batch if unset)");
    topics->add_option("--out", topics_args.out, "topic assignments output, jsonl")->required();
    topics->add_option("--sse-csv", topics_args.sse_csv, "per-k sse series for plotting")->required();
    topics->add_option("--vocab-out", topics_args.vocab_out, "embedding vocabulary output, jsonl");
    topics->callback([&] {
        if (topics_args.vocab_out.empty()) {
            topics_args.vocab_out =
                (std::filesystem::path(topics_args.out).parent_path() / "vocab.jsonl").string();
        }
        kbfresh::stage_topics(topics_args);
    });

    kbfresh::BuildGraphsArgs graphs_args;
    auto* graphs = app.add_subcommand("build-graphs", "build labeled property graphs for seeds");
    allow_config(graphs);
    graphs->add_option("--seeds", graphs_args.seeds, "seed list from extract-seeds")->required();
    graphs->add_option("--source", graphs_args.source, "encyclopedia dump file or http(s) url")
        ->required();
    graphs->add_option("--topics", graphs_args.topics, "topic assignments from topics")->required();
    graphs->add_option("--vocab", graphs_args.vocab, "embedding vocabulary from topics");
    graphs->add_option("--window", graphs_args.window, "label window, start..end")->required();
    graphs->add_option("--max-failure-rate", graphs_args.max_failure_rate,
                       "abort when more than this fraction of fetches fail");
    graphs->add_flag("--topic-node,!--no-topic-node", graphs_args.include_topic,
                     "attach the topic node (on by default)");
    graphs->add_option("--out", graphs_args.out, "graph dataset output, jsonl")->required();
    graphs->callback([&] {
        if (graphs_args.vocab.empty()) {
            graphs_args.vocab =
                (std::filesystem::path(graphs_args.topics).parent_path() / "vocab.jsonl").string();
        }
        kbfresh::stage_build_graphs(graphs_args);
    });

    kbfresh::TrainArgs train_args;
    auto* train = app.add_subcommand("train", "fit the staleness scorer");
    allow_config(train);
    train->add_option("--graphs", train_args.graphs, "graph dataset from build-graphs")->required();
    train->add_option("--lr", train_args.learning_rate, "sgd learning rate");
    train->add_option("--epochs", train_args.epochs, "training epochs");
    train->add_option("--seed", train_args.seed, "init and shuffle rng seed");
    train->add_option("--threshold", train_args.threshold, "score cutoff used for accuracy curves");
    train->add_option("--out", train_args.out_model, "model output, json")->required();
    train->add_option("--curves", train_args.out_curves, "per-epoch loss/accuracy csv")->required();
    train->callback([&] { kbfresh::stage_train(train_args); });

    kbfresh::PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "score graphs with a trained model");
    allow_config(predict);
    predict->add_option("--graphs", predict_args.graphs, "graph dataset from build-graphs")
        ->required();
    predict->add_option("--model", predict_args.model, "model from train")->required();
    predict->add_option("--threshold", predict_args.threshold, "score cutoff for the stale label");
    predict->add_option("--jobs", predict_args.jobs, "worker threads");
    predict->add_option("--out", predict_args.out, "predictions output, jsonl")->required();
    predict->callback([&] { kbfresh::stage_predict(predict_args); });

    kbfresh::SyncArgs sync_args;
    auto* sync = app.add_subcommand("sync", "refresh stale entities against the source");
    allow_config(sync);
    sync->add_option("--kb", sync_args.kb, "knowledge base snapshot, jsonl")->required();
    sync->add_option("--preds", sync_args.preds, "predictions from predict")->required();
    sync->add_option("--source", sync_args.source, "encyclopedia dump file or http(s) url")
        ->required();
    sync->add_option("--max-dist", sync_args.max_dist, "edit-distance cap for predicate matching");
    sync->add_flag("--dry-run", sync_args.dry_run, "report changes without applying them");
    sync->add_option("--report", sync_args.report, "per-entity change report, jsonl")->required();
    sync->add_option("--out", sync_args.out, "updated knowledge base output, jsonl")->required();
    sync->callback([&] { kbfresh::stage_sync(sync_args); });

    kbfresh::EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "score predictions against graph labels");
    allow_config(eval);
    eval->add_option("--preds", eval_args.preds, "predictions from predict")->required();
    eval->add_option("--labels", eval_args.labels, "labeled graph dataset from build-graphs")
        ->required();
    eval->add_option("--out", eval_args.out, "metrics json, merged if present")->required();
    eval->callback([&] { kbfresh::stage_eval(eval_args); });

    kbfresh::EvalKlArgs kl_args;
    kl_args.out = "metrics.json";
    auto* evalkl = app.add_subcommand("eval-kl", "topic drift between queried and stale entities");
    allow_config(evalkl);
    evalkl->add_option("--p", kl_args.p_seeds, "reference side: seed list from extract-seeds")
        ->required();
    evalkl->add_option("--q", kl_args.q_preds, "comparison side: predictions from predict")
        ->required();
    evalkl->add_option("--topics", kl_args.topics, "topic assignments from topics")->required();
    evalkl->add_option("--out", kl_args.out, "metrics json, merged if present");
    evalkl->callback([&] { kbfresh::stage_eval_kl(kl_args); });

    kbfresh::ReportArgs report_args;
    report_args.dir = ".";
    report_args.out = "report.txt";
    auto* report = app.add_subcommand("report", "summarize a run directory");
    allow_config(report);
    report->add_option("--dir", report_args.dir, "directory holding manifest.jsonl");
    report->add_option("--out", report_args.out, "plain-text report output");
    report->callback([&] { kbfresh::stage_report(report_args); });

    kbfresh::RunConfig run_config;
    auto* runall = app.add_subcommand("run-all", "run every stage into one directory");
    allow_config(runall);
    runall->add_option("--log", run_config.log, "query log, jsonl or plain text")->required();
    runall->add_option("--kb", run_config.kb, "knowledge base snapshot, jsonl")->required();
    runall->add_option("--source", run_config.source, "encyclopedia dump or url (defaults to --kb)");
    runall->add_option("--out-dir", run_config.out_dir, "directory for all artifacts");
    runall->add_option("--window", run_config.window, "label window, start..end")->required();
    runall->add_option("--seed", run_config.seed, "rng seed for clustering and training");
    runall->add_option("--nmax", run_config.n_max, "longest n-gram to try");
    runall->add_option("--max-dist", run_config.max_dist, "edit-distance cap");
    runall->add_option("--k", run_config.k, "cluster count, or \"auto\" for elbow selection");
    runall->add_option("--k-min", run_config.k_min, "smallest k tried when --k auto");
    runall->add_option("--k-max", run_config.k_max, "largest k tried when --k auto");
    runall->add_option("--epochs", run_config.epochs, "training epochs");
    runall->add_option("--lr", run_config.learning_rate, "sgd learning rate");
    runall->add_option("--threshold", run_config.threshold, "score cutoff for the stale label");
    runall->add_option("--jobs", run_config.jobs, "prediction worker threads");
    runall->add_flag("--dry-run", run_config.dry_run, "report sync changes without applying");
    runall->add_flag("--topic-node,!--no-topic-node", run_config.include_topic,
                     "attach topic nodes to graphs (on by default)");
    runall->callback([&] { kbfresh::run_all(run_config); });

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 takes the vector reversed
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const kbfresh::Error& e) {
        std::cerr << "kbfresh: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "kbfresh: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
