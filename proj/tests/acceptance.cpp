// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Every check is property-based or runs a synthetic analogue; tolerances are
// stated next to each check.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "kbfresh/encyc.hpp"
#include "kbfresh/error.hpp"
#include "kbfresh/kb_model.hpp"
#include "kbfresh/metrics.hpp"
#include "kbfresh/pipeline.hpp"
#include "kbfresh/predictor.hpp"
#include "kbfresh/random.hpp"
#include "kbfresh/sync.hpp"
#include "kbfresh/text.hpp"
#include "kbfresh/topic.hpp"

using namespace kbfresh;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = FIXTURE_DIR;
const std::string kBin = KBFRESH_BIN;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------- graphs --

PropertyGraph random_graph(Rng& rng, std::size_t n, std::size_t f) {
    PropertyGraph g;
    g.entity_id = "t";
    g.label = static_cast<int>(uniform_index(rng, 2));
    g.roles.assign(n, NodeRole::Value);
    g.roles[0] = NodeRole::Center;
    g.adjacency.assign(n * n, 0);
    g.features.assign(n, std::vector<double>(f));
    for (auto& row : g.features) {
        for (auto& x : row) x = uniform_range(rng, -1.0, 1.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (uniform01(rng) < 0.5) g.set_edge(i, j);
        }
    }
    return g;
}

double loss_at(const PropertyGraph& g, const GcnParams& p, int y) {
    return bce_loss(gcn_forward(g, p).p, y);
}

struct ParamView {
    Mat GcnParams::*param;
    Mat GcnGrads::*grad;
};

constexpr ParamView kParams[] = {
    {&GcnParams::W0, &GcnGrads::W0},  {&GcnParams::W1, &GcnGrads::W1},
    {&GcnParams::F1, &GcnGrads::F1},  {&GcnParams::F2, &GcnGrads::F2},
    {&GcnParams::Out, &GcnGrads::Out}, {&GcnParams::b1, &GcnGrads::b1},
    {&GcnParams::b2, &GcnGrads::b2},
};

// |analytic - numeric| / max(1e-6, |analytic| + |numeric|), maximized over
// every trainable scalar.
double max_rel_error(const PropertyGraph& g, GcnParams& params, int y, double step) {
    const GcnGrads grads = gcn_backward(params, gcn_forward(g, params), y);
    double worst = 0.0;
    auto probe = [&](double& value, double analytic) {
        const double saved = value;
        value = saved + step;
        const double up = loss_at(g, params, y);
        value = saved - step;
        const double down = loss_at(g, params, y);
        value = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double rel = std::abs(analytic - numeric) /
                           std::max(1e-6, std::abs(analytic) + std::abs(numeric));
        worst = std::max(worst, rel);
    };
    for (const auto& view : kParams) {
        Mat& p = params.*(view.param);
        const Mat& a = grads.*(view.grad);
        for (std::size_t i = 0; i < p.data().size(); ++i) probe(p.data()[i], a.data()[i]);
    }
    probe(params.b_out, grads.b_out);
    return worst;
}

// ------------------------------------------------------- ablation dataset --

// 300 hub-and-spoke graphs. Feature slots: 0 center, 1/2 first marker
// present/absent, 3/4 second marker present/absent, 5/6 topic one/zero.
// Structural signal z = XOR(markers); label y = z with exactly 23/150 flips
// per class; topic t = y with exactly 15/150 flips per class, which pins the
// topic-label phi correlation at (135*135 - 15*15) / 150^2 = 0.8 exactly.
struct AblationData {
    std::vector<PropertyGraph> with_topic;
    std::vector<PropertyGraph> without_topic;
    double phi = 0.0;
};

std::vector<std::size_t> pick_flips(const std::vector<int>& cls, int value, std::size_t count,
                                    Rng& rng) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (cls[i] == value) members.push_back(i);
    }
    shuffle_deterministic(members, rng);
    members.resize(count);
    return members;
}

PropertyGraph ablation_graph(bool has_u, bool has_v, int label, int topic, bool include_topic) {
    const std::size_t n = include_topic ? 4 : 3;
    PropertyGraph g;
    g.entity_id = "s";
    g.label = label;
    g.roles.assign(n, NodeRole::Value);
    g.roles[0] = NodeRole::Center;
    g.adjacency.assign(n * n, 0);
    g.features.assign(n, std::vector<double>(7, 0.0));
    g.features[0][0] = 1.0;
    g.features[1][has_u ? 1 : 2] = 1.0;
    g.features[2][has_v ? 3 : 4] = 1.0;
    g.set_edge(0, 1);
    g.set_edge(0, 2);
    if (include_topic) {
        g.roles[3] = NodeRole::Topic;
        g.features[3][topic == 1 ? 5 : 6] = 1.0;
        g.set_edge(0, 3);
    }
    return g;
}

AblationData build_ablation() {
    const std::size_t n = 300;
    std::vector<int> has_u(n), has_v(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        has_u[i] = static_cast<int>(i % 4) / 2;
        has_v[i] = static_cast<int>(i % 4) % 2;
        z[i] = has_u[i] ^ has_v[i];
    }
    std::vector<int> y = z;
    Rng rng(202);
    for (int cls : {0, 1}) {
        for (std::size_t i : pick_flips(z, cls, 23, rng)) y[i] = 1 - y[i];
    }
    std::vector<int> t = y;
    for (int cls : {0, 1}) {
        for (std::size_t i : pick_flips(y, cls, 15, rng)) t[i] = 1 - t[i];
    }

    double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] == 1 && t[i] == 1) ++n11;
        else if (y[i] == 1) ++n10;
        else if (t[i] == 1) ++n01;
        else ++n00;
    }
    AblationData data;
    data.phi = (n11 * n00 - n10 * n01) /
               std::sqrt((n11 + n10) * (n01 + n00) * (n11 + n01) * (n10 + n00));
    for (std::size_t i = 0; i < n; ++i) {
        data.with_topic.push_back(ablation_graph(has_u[i], has_v[i], y[i], t[i], true));
        data.without_topic.push_back(ablation_graph(has_u[i], has_v[i], y[i], t[i], false));
    }
    return data;
}

template <typename ScoreFn>
double test_auc(const std::vector<PropertyGraph>& dataset, const std::vector<std::size_t>& test,
                const ScoreFn& score_of) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i : test) {
        scores.push_back(score_of(dataset[i]));
        labels.push_back(dataset[i].label);
    }
    return auc(scores, labels);
}

// ----------------------------------------------------------- sync helpers --

Entity random_entity(Rng& rng) {
    static const std::vector<std::string> preds = {"length", "lenght",  "colour",    "color",
                                                   "region", "area",    "status",    "population"};
    static const std::vector<std::string> objs = {"1", "2", "3", "red", "blue", "cyan", "68 km"};
    std::set<std::pair<std::string, std::string>> chosen;
    const std::size_t count = 1 + uniform_index(rng, 6);
    while (chosen.size() < count) {
        chosen.emplace(preds[uniform_index(rng, preds.size())],
                       objs[uniform_index(rng, objs.size())]);
    }
    Entity e;
    e.id = "e1";
    e.name = "e";
    e.summary = "synthetic";
    for (const auto& [p, o] : chosen) e.triples.push_back(Triple{"e", p, o});
    shuffle_deterministic(e.triples, rng);
    return e;
}

bool same_triples(const Entity& a, const Entity& b) {
    if (a.triples.size() != b.triples.size()) return false;
    for (std::size_t i = 0; i < a.triples.size(); ++i) {
        if (a.triples[i].predicate != b.triples[i].predicate ||
            a.triples[i].object != b.triples[i].object)
            return false;
    }
    return true;
}

// ------------------------------------------------------------ CLI harness --

int run_cli(const std::string& args, const fs::path& capture) {
    const std::string cmd = kBin + " " + args + " >" + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

// --------------------------------------------------------------- criteria --

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome crit1_gradients() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(42);
    double worst = 0.0;
    for (int it = 0; it < 10; ++it) {
        const std::size_t n = 1 + uniform_index(rng, 6);
        const std::size_t f = 3 + uniform_index(rng, 6);
        const PropertyGraph g = random_graph(rng, n, f);
        GcnParams params = init_params(f, 1000 + it);
        worst = std::max(worst, max_rel_error(g, params, g.label, 1e-5));
    }
    const double elapsed = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf, "max rel err %.3e (tol 1e-4) on 10 graphs in %.2f s (cap 10)",
                  worst, elapsed);
    return {worst < 1e-4 && elapsed < 10.0, buf};
}

Outcome crit2_permutation() {
    Rng rng(2024);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 2 + uniform_index(rng, 6);
        const std::size_t f = 3 + uniform_index(rng, 6);
        const PropertyGraph g = random_graph(rng, n, f);
        const GcnParams p = init_params(f, it);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        shuffle_deterministic(perm, rng);
        PropertyGraph h = g;
        for (std::size_t i = 0; i < n; ++i) {
            h.roles[perm[i]] = g.roles[i];
            h.features[perm[i]] = g.features[i];
            for (std::size_t j = 0; j < n; ++j) {
                h.adjacency[perm[i] * n + perm[j]] = g.adjacency[i * n + j];
            }
        }
        worst = std::max(worst, std::abs(gcn_forward(g, p).p - gcn_forward(h, p).p));
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "max probability shift %.3e (tol 1e-9) on 100 graphs", worst);
    return {worst < 1e-9, buf};
}

Outcome crit3_overfit() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(11);
    std::vector<PropertyGraph> data;
    for (std::size_t i = 0; i < 20; ++i) {
        PropertyGraph g = random_graph(rng, 2 + uniform_index(rng, 3), 5);
        g.label = static_cast<int>(i % 2);
        const double shift = g.label == 1 ? 1.5 : -1.5;
        for (auto& row : g.features) {
            for (auto& x : row) x += shift;
        }
        data.push_back(std::move(g));
    }
    TrainConfig config;
    config.train_frac = 1.0;
    config.test_frac = 0.0;
    config.val_frac = 0.0;
    config.epochs = 200;
    config.learning_rate = 0.1;
    config.seed = 7;
    const TrainResult r = train(data, config);
    double best = 0.0;
    int reached = -1;
    for (std::size_t e = 0; e < r.curves.train_acc.size(); ++e) {
        best = std::max(best, r.curves.train_acc[e]);
        if (reached < 0 && r.curves.train_acc[e] >= 0.95) reached = static_cast<int>(e) + 1;
    }
    const double elapsed = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "train acc %.2f on 20 graphs (need 0.95), reached at epoch %d, %.2f s (cap 30)",
                  best, reached, elapsed);
    return {best >= 0.95 && reached > 0 && reached <= 200 && elapsed < 30.0, buf};
}

Outcome crit4_ablation() {
    const AblationData data = build_ablation();
    if (std::abs(data.phi - 0.8) > 1e-12) {
        return {false, "topic-label correlation drifted from 0.8: " + std::to_string(data.phi)};
    }
    double sum_with = 0.0, sum_without = 0.0, sum_logistic = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        TrainConfig config;
        config.epochs = 30;
        config.learning_rate = 0.2;
        config.seed = seed;

        const TrainResult with = train(data.with_topic, config);
        sum_with += test_auc(data.with_topic, with.split.test, [&](const PropertyGraph& g) {
            return gcn_forward(g, with.params).p;
        });
        const TrainResult without = train(data.without_topic, config);
        sum_without += test_auc(data.without_topic, without.split.test,
                                [&](const PropertyGraph& g) {
                                    return gcn_forward(g, without.params).p;
                                });
        const LogisticResult logistic = baseline_logistic(data.with_topic, config);
        sum_logistic += test_auc(data.with_topic, logistic.split.test,
                                 [&](const PropertyGraph& g) {
                                     return logistic_score(logistic.model, g);
                                 });
    }
    const double with_auc = sum_with / 5.0;
    const double without_auc = sum_without / 5.0;
    const double logistic_auc = sum_logistic / 5.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "5-seed mean test AUC: with-topic %.3f >= without %.3f; gcn %.3f > logistic "
                  "%.3f; phi = %.1f",
                  with_auc, without_auc, with_auc, logistic_auc, data.phi);
    return {with_auc >= without_auc && with_auc > logistic_auc, buf};
}

Outcome crit5_kmeans() {
    // the library asserts full-batch SSE monotonicity inline; violations
    // surface as InternalError from these runs
    Rng noise(88);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<std::vector<double>> points;
        for (int i = 0; i < 100; ++i) {
            points.push_back({uniform01(noise) * 4.0, uniform01(noise) * 4.0, uniform01(noise)});
        }
        kmeans(points, 5, seed);
    }

    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        std::vector<std::vector<double>> points;
        for (const auto& c : {std::pair{0.0, 0.0}, {10.0, 10.0}, {20.0, 0.0}}) {
            for (int i = 0; i < 30; ++i) {
                points.push_back({c.first + uniform_range(rng, -0.5, 0.5),
                                  c.second + uniform_range(rng, -0.5, 0.5)});
            }
        }
        if (choose_k(points, 2, 8, seed).k == 3) ++hits;
    }
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "SSE monotone on 10 runs; elbow picked k=3 on %d/5 seeds (range 2..8)", hits);
    return {hits == 5, buf};
}

Outcome crit6_edit_distance() {
    Rng rng(20240817);
    auto random_string = [&](std::size_t max_len) {
        std::string s;
        const std::size_t len = uniform_index(rng, max_len + 1);
        for (std::size_t i = 0; i < len; ++i) {
            s.push_back(static_cast<char>('a' + uniform_index(rng, 4)));
        }
        return s;
    };
    auto oracle = [](const std::string& a, const std::string& b) {
        std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                                std::vector<std::size_t>(b.size() + 1));
        for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
        for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            for (std::size_t j = 1; j <= b.size(); ++j) {
                const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
                d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
            }
        }
        return d[a.size()][b.size()];
    };

    for (int it = 0; it < 1000; ++it) {
        const std::string a = random_string(20), b = random_string(20);
        if (edit_distance(a, b) != oracle(a, b)) {
            return {false, "oracle mismatch on pair " + std::to_string(it)};
        }
    }
    for (int it = 0; it < 1000; ++it) {
        const std::string a = random_string(12), b = random_string(12), c = random_string(12);
        const std::size_t ab = edit_distance(a, b), ba = edit_distance(b, a);
        const std::size_t ac = edit_distance(a, c), bc = edit_distance(b, c);
        if (ab != ba) return {false, "symmetry broken on triple " + std::to_string(it)};
        if (edit_distance(a, a) != 0) return {false, "identity broken"};
        if ((ab == 0) != (a == b)) return {false, "separation broken"};
        if (ac > ab + bc) return {false, "triangle inequality broken on " + std::to_string(it)};
    }
    return {true, "matches DP oracle on 1000 pairs (len <= 20); metric axioms on 1000 triples"};
}

Outcome crit7_auc() {
    Rng rng(500);
    for (int it = 0; it < 500; ++it) {
        const std::size_t n = 2 + uniform_index(rng, 40);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(uniform_index(rng, 8)) / 8.0;
            labels[i] = static_cast<int>(uniform_index(rng, 2));
            (labels[i] ? has1 : has0) = true;
        }
        if (!has0) labels[0] = 0;
        if (!has1) labels[n - 1] = 1;

        double wins = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] != 1) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (labels[j] != 0) continue;
                ++pairs;
                if (scores[i] > scores[j]) wins += 1.0;
                else if (scores[i] == scores[j]) wins += 0.5;
            }
        }
        if (auc(scores, labels) != wins / static_cast<double>(pairs)) {
            return {false, "all-pairs oracle mismatch on instance " + std::to_string(it)};
        }
    }
    return {true, "equals the all-pairs oracle bit for bit on 500 instances (ties included)"};
}

Outcome crit8_kl() {
    const double idealized = kl_bits({1.0, 0.0}, {0.5, 0.5});
    if (std::abs(idealized - 1.0) > 1e-9) {
        return {false, "KL([1,0],[0.5,0.5]) = " + std::to_string(idealized) + ", want 1 bit"};
    }
    Rng rng(9000);
    for (int it = 0; it < 1000; ++it) {
        std::vector<int> a, b;
        const std::size_t na = uniform_index(rng, 30), nb = uniform_index(rng, 30);
        for (std::size_t i = 0; i < na; ++i) a.push_back(static_cast<int>(uniform_index(rng, 6)));
        for (std::size_t i = 0; i < nb; ++i) b.push_back(static_cast<int>(uniform_index(rng, 6)));
        const TopicDistribution pa = topic_distribution(a);
        const TopicDistribution pb = topic_distribution(b);
        if (kl_divergence_bits(pa, pa) != 0.0) {
            return {false, "KL(P,P) != 0 on instance " + std::to_string(it)};
        }
        const double kl = kl_divergence_bits(pa, pb);
        if (!(kl >= 0.0) || !std::isfinite(kl)) {
            return {false, "smoothed KL negative or non-finite on " + std::to_string(it)};
        }
    }
    return {true, "KL(P,P)=0 and KL>=0 on 1000 smoothed pairs; idealized case = 1 bit (1e-9)"};
}

Outcome crit9_sync() {
    Rng rng(20240814);
    for (int it = 0; it < 100; ++it) {
        const Entity kb_e = random_entity(rng);
        const Entity fresh_e = random_entity(rng);
        KnowledgeBase kb;
        kb.add(kb_e);

        const UpdateReport report = diff_entity(kb_e, fresh_e, 2);
        const KnowledgeBase dry = apply_update(kb, report, true);
        if (!same_triples(*dry.find_by_id("e1"), kb_e)) {
            return {false, "dry run mutated the kb on pair " + std::to_string(it)};
        }
        const KnowledgeBase updated = apply_update(kb, report, false);
        if (!diff_entity(*updated.find_by_id("e1"), fresh_e, 2).empty()) {
            return {false, "re-diff not empty on pair " + std::to_string(it)};
        }
    }
    return {true, "diff->apply->re-diff empty on 100 randomized pairs; dry run never mutates"};
}

Outcome crit10_determinism() {
    const fs::path base = fs::path("/tmp") / ("kbfresh_accept_" + std::to_string(getpid()));
    const fs::path a = base / "a", b = base / "b";
    fs::remove_all(base);
    fs::create_directories(a);
    fs::create_directories(b);

    for (const fs::path& dir : {a, b}) {
        const int code = run_cli("run-all --log " + kFixtures + "/log.jsonl --kb " + kFixtures +
                                     "/kb.jsonl --source " + kFixtures +
                                     "/source.jsonl --out-dir " + dir.string() + " --config " +
                                     kFixtures + "/run.cfg",
                                 dir / "stdout.txt");
        if (code != 0) {
            return {false, "run-all exited " + std::to_string(code) + " in " + dir.string()};
        }
    }
    // manifest.jsonl is excluded: it records wall-clock milliseconds
    std::size_t compared = 0;
    for (const char* name :
         {"seeds.jsonl", "topics.jsonl", "vocab.jsonl", "sse.csv", "graphs.jsonl", "model.json",
          "curves.csv", "preds.jsonl", "metrics.json", "report.jsonl", "kb_updated.jsonl",
          "report.txt"}) {
        if (fnv1a64_file((a / name).string()) != fnv1a64_file((b / name).string())) {
            return {false, std::string("artifact differs between runs: ") + name};
        }
        ++compared;
    }
    fs::remove_all(base);

    // boundary semantics: start excluded, end included
    const LabelWindow w{100, 200};
    auto rev = [](std::vector<Timestamp> ts) {
        RevisionRecord r;
        r.entity_id = "x";
        r.timestamps = std::move(ts);
        return r;
    };
    const bool boundaries = label_entity(rev({100}), w) == 0 && label_entity(rev({101}), w) == 1 &&
                            label_entity(rev({200}), w) == 1 && label_entity(rev({201}), w) == 0 &&
                            label_entity(rev({}), w) == 0 && label_entity(rev({100, 200}), w) == 1;
    if (!boundaries) return {false, "label window boundary semantics wrong"};
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "%zu artifacts byte-identical across two runs; window boundaries exact",
                  compared);
    return {true, buf};
}

Outcome crit11_split() {
    const TrainConfig config;
    for (std::size_t n = 1; n <= 400; ++n) {
        const SplitIndices s = split_dataset(n, config);
        std::vector<bool> seen(n, false);
        for (const auto* bucket : {&s.train, &s.test, &s.val}) {
            for (std::size_t i : *bucket) {
                if (i >= n || seen[i]) {
                    return {false, "overlap or out-of-range index at n=" + std::to_string(n)};
                }
                seen[i] = true;
            }
        }
        if (s.train.size() + s.test.size() + s.val.size() != n) {
            return {false, "partition not exhaustive at n=" + std::to_string(n)};
        }
        if (std::abs(static_cast<double>(s.train.size()) - 0.64 * n) >= 1.0 ||
            std::abs(static_cast<double>(s.test.size()) - 0.16 * n) >= 1.0 ||
            std::abs(static_cast<double>(s.val.size()) - 0.20 * n) >= 1.0) {
            return {false, "bucket size off by one or more at n=" + std::to_string(n)};
        }
    }
    return {true, "64/16/20 within rounding, disjoint and exhaustive for n = 1..400"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "gradient correctness", crit1_gradients},
        {2, "permutation invariance", crit2_permutation},
        {3, "overfit capacity", crit3_overfit},
        {4, "topic ablation", crit4_ablation},
        {5, "k-means and elbow", crit5_kmeans},
        {6, "edit distance", crit6_edit_distance},
        {7, "auc oracle", crit7_auc},
        {8, "kl divergence", crit8_kl},
        {9, "sync convergence", crit9_sync},
        {10, "determinism", crit10_determinism},
        {11, "split fidelity", crit11_split},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("[%2d] %s  %-24s %s\n", c.id, outcome.pass ? "PASS" : "FAIL", c.name,
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/11 criteria passed\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
