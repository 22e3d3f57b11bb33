#include "kbfresh/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "kbfresh/error.hpp"
#include "kbfresh/jsonl.hpp"
#include "kbfresh/random.hpp"

namespace kbfresh {

using nlohmann::json;

namespace {

Mat glorot(std::size_t rows, std::size_t cols, Rng& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (double& v : m.data()) v = (uniform01(rng) * 2.0 - 1.0) * s;
    return m;
}

double clamp_prob(double p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

}  // namespace

GcnParams init_params(std::size_t f, std::uint64_t seed) {
    if (f == 0) throw ParameterError("feature dimension must be positive");
    Rng rng(seed);
    GcnParams p;
    p.f = f;
    p.W0 = glorot(f, kGcnHidden, rng);
    p.W1 = glorot(kGcnHidden, kGcnHidden, rng);
    p.F1 = glorot(kGcnHidden, kFc1, rng);
    p.F2 = glorot(kFc1, kFc2, rng);
    p.Out = glorot(kFc2, 1, rng);
    p.b1 = Mat(1, kFc1);
    p.b2 = Mat(1, kFc2);
    p.b_out = 0.0;
    return p;
}

Mat normalize_adjacency(const Mat& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n || n == 0) throw ParameterError("adjacency must be square and non-empty");
    for (std::size_t i = 0; i < n; ++i) {
        if (a(i, i) != 0.0) throw ParameterError("adjacency diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            if (a(i, j) != 0.0 && a(i, j) != 1.0) throw ParameterError("adjacency must be binary");
            if (a(i, j) != a(j, i)) throw ParameterError("adjacency must be symmetric");
        }
    }
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 1.0;  // self-loop
        for (std::size_t j = 0; j < n; ++j) deg += a(i, j);
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
    }
    Mat ahat(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double tilde = (i == j ? 1.0 : a(i, j));
            ahat(i, j) = tilde * inv_sqrt_deg[i] * inv_sqrt_deg[j];
        }
    }
    return ahat;
}

Mat adjacency_matrix(const PropertyGraph& g) {
    const std::size_t n = g.node_count();
    Mat a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = static_cast<double>(g.at(i, j));
    }
    return a;
}

ForwardCache gcn_forward(const PropertyGraph& g, const GcnParams& params) {
    if (g.feature_dim() != params.f) {
        throw ParameterError("graph feature dimension " + std::to_string(g.feature_dim()) +
                             " does not match model dimension " + std::to_string(params.f));
    }
    ForwardCache c;
    c.ahat = normalize_adjacency(adjacency_matrix(g));
    c.x = Mat::from_rows(g.features);
    c.m0 = matmul(c.ahat, c.x);
    c.h1 = relu(matmul(c.m0, params.W0));
    c.m1 = matmul(c.ahat, c.h1);
    c.h2 = relu(matmul(c.m1, params.W1));

    const std::size_t n = c.h2.rows();
    c.hg = Mat(1, kGcnHidden);
    for (std::size_t j = 0; j < kGcnHidden; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += c.h2(i, j);
        c.hg(0, j) = sum / static_cast<double>(n);
    }

    Mat a1 = matmul(c.hg, params.F1);
    a1 += params.b1;
    c.z1 = relu(a1);
    Mat a2 = matmul(c.z1, params.F2);
    a2 += params.b2;
    c.z2 = relu(a2);
    double logit = params.b_out;
    for (std::size_t j = 0; j < kFc2; ++j) logit += c.z2(0, j) * params.Out(j, 0);
    c.p = clamp_prob(1.0 / (1.0 + std::exp(-logit)));
    return c;
}

double bce_loss(double p, int y) {
    const double q = clamp_prob(p);
    return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

GcnGrads gcn_backward(const GcnParams& params, const ForwardCache& cache, int y) {
    const std::size_t n = cache.h2.rows();
    const double dlogit = cache.p - static_cast<double>(y);

    GcnGrads g;
    g.Out = Mat(kFc2, 1);
    for (std::size_t j = 0; j < kFc2; ++j) g.Out(j, 0) = cache.z2(0, j) * dlogit;
    g.b_out = dlogit;

    Mat dz2(1, kFc2);
    for (std::size_t j = 0; j < kFc2; ++j) dz2(0, j) = dlogit * params.Out(j, 0);
    dz2 = relu_backward(dz2, cache.z2);

    g.F2 = matmul_at_b(cache.z1, dz2);
    g.b2 = dz2;

    Mat dz1 = relu_backward(matmul_a_bt(dz2, params.F2), cache.z1);
    g.F1 = matmul_at_b(cache.hg, dz1);
    g.b1 = dz1;

    Mat dhg = matmul_a_bt(dz1, params.F1);  // 1 x 64

    Mat dh2(n, kGcnHidden);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < kGcnHidden; ++j) dh2(i, j) = dhg(0, j) * inv_n;
    }
    dh2 = relu_backward(dh2, cache.h2);

    g.W1 = matmul_at_b(cache.m1, dh2);
    Mat dm1 = matmul_a_bt(dh2, params.W1);
    Mat dh1 = relu_backward(matmul(cache.ahat, dm1), cache.h1);  // Ahat symmetric
    g.W0 = matmul_at_b(cache.m0, dh1);
    return g;
}

SplitIndices split_dataset(std::size_t n, const TrainConfig& config) {
    const double fracs[3] = {config.train_frac, config.test_frac, config.val_frac};
    const double sum = fracs[0] + fracs[1] + fracs[2];
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    if (fracs[0] < 0 || fracs[1] < 0 || fracs[2] < 0) {
        throw ConfigError("split fractions must be non-negative");
    }

    std::size_t sizes[3];
    double remainders[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = fracs[i] * static_cast<double>(n);
        sizes[i] = static_cast<std::size_t>(exact);
        remainders[i] = exact - static_cast<double>(sizes[i]);
        assigned += sizes[i];
    }
    while (assigned < n) {
        int best = 0;
        for (int i = 1; i < 3; ++i) {
            if (remainders[i] > remainders[best]) best = i;
        }
        sizes[best] += 1;
        remainders[best] = -1.0;
        ++assigned;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(config.seed);
    shuffle_deterministic(order, rng);

    SplitIndices split;
    split.train.assign(order.begin(), order.begin() + sizes[0]);
    split.test.assign(order.begin() + sizes[0], order.begin() + sizes[0] + sizes[1]);
    split.val.assign(order.begin() + sizes[0] + sizes[1], order.end());
    return split;
}

namespace {

void apply_sgd(GcnParams& p, const GcnGrads& g, double lr) {
    auto step = [lr](Mat& w, const Mat& grad) {
        for (std::size_t i = 0; i < w.data().size(); ++i) w.data()[i] -= lr * grad.data()[i];
    };
    step(p.W0, g.W0);
    step(p.W1, g.W1);
    step(p.F1, g.F1);
    step(p.F2, g.F2);
    step(p.Out, g.Out);
    step(p.b1, g.b1);
    step(p.b2, g.b2);
    p.b_out -= lr * g.b_out;
}

// Mean loss and accuracy over the indexed subset; (0,0) when empty.
template <typename ScoreFn>
std::pair<double, double> evaluate(const std::vector<PropertyGraph>& dataset,
                                   const std::vector<std::size_t>& idx, double threshold,
                                   const ScoreFn& score_of) {
    if (idx.empty()) return {0.0, 0.0};
    double loss = 0.0;
    double correct = 0.0;
    for (std::size_t i : idx) {
        const double p = score_of(dataset[i]);
        loss += bce_loss(p, dataset[i].label);
        const int pred = p >= threshold ? 1 : 0;
        if (pred == dataset[i].label) correct += 1.0;
    }
    const double m = static_cast<double>(idx.size());
    return {loss / m, correct / m};
}

void check_train_classes(const std::vector<PropertyGraph>& dataset,
                         const std::vector<std::size_t>& train_idx) {
    bool has0 = false, has1 = false;
    for (std::size_t i : train_idx) (dataset[i].label == 1 ? has1 : has0) = true;
    if (!has0 || !has1) {
        throw ConfigError("training split must contain both classes");
    }
}

}  // namespace

TrainResult train(const std::vector<PropertyGraph>& dataset, const TrainConfig& config) {
    if (dataset.empty()) throw ConfigError("empty dataset");
    if (config.learning_rate < 0.0) throw ConfigError("learning rate must be non-negative");
    if (config.epochs < 0) throw ConfigError("epochs must be non-negative");
    const std::size_t f = dataset[0].feature_dim();
    for (const auto& g : dataset) {
        if (g.feature_dim() != f) throw ParameterError("mixed feature dimensions in dataset");
    }

    TrainResult result;
    result.split = split_dataset(dataset.size(), config);
    check_train_classes(dataset, result.split.train);

    Rng rng(config.seed + 1);  // distinct stream from the split shuffle
    result.params = init_params(f, config.seed);

    std::vector<std::size_t> order = result.split.train;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_deterministic(order, rng);
        for (std::size_t i : order) {
            const ForwardCache cache = gcn_forward(dataset[i], result.params);
            const GcnGrads grads = gcn_backward(result.params, cache, dataset[i].label);
            apply_sgd(result.params, grads, config.learning_rate);
        }
        auto score = [&](const PropertyGraph& g) { return gcn_forward(g, result.params).p; };
        const auto [tl, ta] = evaluate(dataset, result.split.train, config.threshold, score);
        const auto [vl, va] = evaluate(dataset, result.split.val, config.threshold, score);
        result.curves.train_loss.push_back(tl);
        result.curves.train_acc.push_back(ta);
        result.curves.val_loss.push_back(vl);
        result.curves.val_acc.push_back(va);
    }
    return result;
}

Prediction predict(const PropertyGraph& g, const GcnParams& params, double threshold) {
    const double score = gcn_forward(g, params).p;
    return Prediction{score >= threshold ? 1 : 0, score};
}

namespace {

std::vector<double> pooled_features(const PropertyGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<double> pooled(g.feature_dim(), 0.0);
    for (const auto& row : g.features) {
        for (std::size_t j = 0; j < pooled.size(); ++j) pooled[j] += row[j];
    }
    for (double& v : pooled) v /= static_cast<double>(n);
    return pooled;
}

}  // namespace

double logistic_score(const LogisticModel& model, const PropertyGraph& g) {
    const std::vector<double> x = pooled_features(g);
    if (x.size() != model.w.size()) {
        throw ParameterError("graph feature dimension does not match logistic model");
    }
    double z = model.b;
    for (std::size_t j = 0; j < x.size(); ++j) z += model.w[j] * x[j];
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, 1.0 / (1.0 + std::exp(-z))));
}

LogisticResult baseline_logistic(const std::vector<PropertyGraph>& dataset,
                                 const TrainConfig& config) {
    if (dataset.empty()) throw ConfigError("empty dataset");
    if (config.learning_rate < 0.0) throw ConfigError("learning rate must be non-negative");
    const std::size_t f = dataset[0].feature_dim();
    for (const auto& g : dataset) {
        if (g.feature_dim() != f) throw ParameterError("mixed feature dimensions in dataset");
    }

    LogisticResult result;
    result.split = split_dataset(dataset.size(), config);
    check_train_classes(dataset, result.split.train);
    result.model.w.assign(f, 0.0);
    result.model.b = 0.0;

    Rng rng(config.seed + 1);
    std::vector<std::size_t> order = result.split.train;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_deterministic(order, rng);
        for (std::size_t i : order) {
            const std::vector<double> x = pooled_features(dataset[i]);
            double z = result.model.b;
            for (std::size_t j = 0; j < f; ++j) z += result.model.w[j] * x[j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double d = p - static_cast<double>(dataset[i].label);
            for (std::size_t j = 0; j < f; ++j) {
                result.model.w[j] -= config.learning_rate * d * x[j];
            }
            result.model.b -= config.learning_rate * d;
        }
        auto score = [&](const PropertyGraph& g) { return logistic_score(result.model, g); };
        const auto [tl, ta] = evaluate(dataset, result.split.train, config.threshold, score);
        const auto [vl, va] = evaluate(dataset, result.split.val, config.threshold, score);
        result.curves.train_loss.push_back(tl);
        result.curves.train_acc.push_back(ta);
        result.curves.val_loss.push_back(vl);
        result.curves.val_acc.push_back(va);
    }
    return result;
}

namespace {

json mat_to_json(const Mat& m) {
    json arr = json::array();
    for (double v : m.data()) arr.push_back(v);
    return arr;
}

Mat mat_from_json(const json& arr, std::size_t rows, std::size_t cols, const char* name) {
    if (!arr.is_array() || arr.size() != rows * cols) {
        throw ParseError(std::string("model field ") + name + " has wrong shape");
    }
    Mat m(rows, cols);
    for (std::size_t i = 0; i < m.data().size(); ++i) {
        if (!arr[i].is_number()) {
            throw ParseError(std::string("model field ") + name + " holds a non-number");
        }
        m.data()[i] = arr[i].get<double>();
    }
    return m;
}

}  // namespace

void save_model(const GcnParams& params, const std::string& path) {
    json j;
    j["version"] = 1;
    j["f"] = params.f;
    j["gcn_units"] = json::array({kGcnHidden, kGcnHidden});
    j["fc_units"] = json::array({kFc1, kFc2});
    j["W0"] = mat_to_json(params.W0);
    j["W1"] = mat_to_json(params.W1);
    j["F1"] = mat_to_json(params.F1);
    j["F2"] = mat_to_json(params.F2);
    j["Out"] = mat_to_json(params.Out);
    j["b1"] = mat_to_json(params.b1);
    j["b2"] = mat_to_json(params.b2);
    j["b_out"] = params.b_out;
    auto out = open_output(path);
    out << j.dump() << '\n';
}

GcnParams load_model(const std::string& path) {
    auto in = open_input(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": bad model JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("version") || j["version"] != 1) {
        throw ParseError(path + ": unsupported model version");
    }
    if (!j.contains("f") || !j["f"].is_number_unsigned()) {
        throw ParseError(path + ": missing feature dimension");
    }
    GcnParams p;
    p.f = j["f"].get<std::size_t>();
    try {
        p.W0 = mat_from_json(j.at("W0"), p.f, kGcnHidden, "W0");
        p.W1 = mat_from_json(j.at("W1"), kGcnHidden, kGcnHidden, "W1");
        p.F1 = mat_from_json(j.at("F1"), kGcnHidden, kFc1, "F1");
        p.F2 = mat_from_json(j.at("F2"), kFc1, kFc2, "F2");
        p.Out = mat_from_json(j.at("Out"), kFc2, 1, "Out");
        p.b1 = mat_from_json(j.at("b1"), 1, kFc1, "b1");
        p.b2 = mat_from_json(j.at("b2"), 1, kFc2, "b2");
        if (!j.at("b_out").is_number()) throw ParseError("model field b_out is not a number");
        p.b_out = j.at("b_out").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return p;
}

void save_curves(const TrainingCurves& curves, const std::string& path) {
    auto out = open_output(path);
    out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (std::size_t e = 0; e < curves.train_loss.size(); ++e) {
        out << (e + 1) << ',' << json(curves.train_loss[e]).dump() << ','
            << json(curves.train_acc[e]).dump() << ',' << json(curves.val_loss[e]).dump() << ','
            << json(curves.val_acc[e]).dump() << '\n';
    }
}

}  // namespace kbfresh
