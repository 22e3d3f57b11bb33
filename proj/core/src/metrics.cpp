#include "kbfresh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kbfresh/error.hpp"

namespace kbfresh {

double mse(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.empty()) throw ParameterError("mse of empty input");
    if (scores.size() != labels.size()) throw ParameterError("mse input length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double d = scores[i] - static_cast<double>(labels[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(scores.size());
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ParameterError("auc input length mismatch");
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : labels) (y == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) {
        throw UndefinedMetricError("auc undefined: labels contain a single class");
    }

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Walk tie groups in ascending score order. Every addend is an integer
    // or half-integer, so the accumulation is exact.
    double numerator = 0.0;
    double neg_below = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        double group_pos = 0.0, group_neg = 0.0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? group_pos : group_neg) += 1.0;
            ++j;
        }
        numerator += group_pos * neg_below + 0.5 * group_pos * group_neg;
        neg_below += group_neg;
        i = j;
    }
    return numerator / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

struct ClassStats {
    double precision = 0, recall = 0, f1 = 0;
    bool degenerate = false;
};

ClassStats one_class(const std::vector<int>& predictions, const std::vector<int>& labels,
                     int positive) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred_pos = predictions[i] == positive;
        const bool is_pos = labels[i] == positive;
        if (pred_pos && is_pos) tp += 1;
        if (pred_pos && !is_pos) fp += 1;
        if (!pred_pos && is_pos) fn += 1;
    }
    ClassStats s;
    if (tp + fp > 0) {
        s.precision = tp / (tp + fp);
    } else {
        s.degenerate = true;
    }
    if (tp + fn > 0) {
        s.recall = tp / (tp + fn);
    } else {
        s.degenerate = true;
    }
    if (s.precision + s.recall > 0) {
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    } else {
        s.degenerate = true;
    }
    return s;
}

}  // namespace

PrfResult prf(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.empty()) throw ParameterError("prf of empty input");
    if (predictions.size() != labels.size()) throw ParameterError("prf input length mismatch");
    const ClassStats uc = one_class(predictions, labels, 0);
    const ClassStats c = one_class(predictions, labels, 1);
    PrfResult r;
    r.precision_uc = uc.precision;
    r.recall_uc = uc.recall;
    r.f1_uc = uc.f1;
    r.precision_c = c.precision;
    r.recall_c = c.recall;
    r.f1_c = c.f1;
    r.degenerate = uc.degenerate || c.degenerate;
    return r;
}

std::size_t TopicDistribution::total() const {
    std::size_t sum = 0;
    for (const auto& [topic, count] : counts) sum += count;
    return sum;
}

TopicDistribution topic_distribution(const std::vector<int>& topic_ids) {
    TopicDistribution d;
    for (int t : topic_ids) d.counts[t] += 1;
    return d;
}

double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw ParameterError("kl input length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] <= 0.0) throw ParameterError("kl undefined: q has zero mass where p > 0");
        sum += p[i] * std::log2(p[i] / q[i]);
    }
    return sum;
}

double kl_divergence_bits(const TopicDistribution& p, const TopicDistribution& q) {
    std::set<int> support;
    for (const auto& [topic, count] : p.counts) support.insert(topic);
    for (const auto& [topic, count] : q.counts) support.insert(topic);
    if (support.empty()) return 0.0;

    const double m = static_cast<double>(support.size());
    const double p_total = static_cast<double>(p.total()) + m;
    const double q_total = static_cast<double>(q.total()) + m;
    std::vector<double> pv, qv;
    pv.reserve(support.size());
    qv.reserve(support.size());
    for (int topic : support) {
        auto pc = p.counts.find(topic);
        auto qc = q.counts.find(topic);
        pv.push_back((1.0 + (pc == p.counts.end() ? 0.0 : static_cast<double>(pc->second))) /
                     p_total);
        qv.push_back((1.0 + (qc == q.counts.end() ? 0.0 : static_cast<double>(qc->second))) /
                     q_total);
    }
    return kl_bits(pv, qv);
}

double kl_count_scaled(const TopicDistribution& p, const TopicDistribution& q) {
    return kl_divergence_bits(p, q) * static_cast<double>(p.total());
}

}  // namespace kbfresh
