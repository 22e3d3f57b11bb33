#pragma once
// Evaluation metrics: MSE, rank-based AUC, per-class precision/recall/F1,
// and KL divergence between topic distributions.

#include <cstddef>
#include <map>
#include <vector>

namespace kbfresh {

// Mean of (score - label)^2. Empty or mismatched inputs -> ParameterError.
double mse(const std::vector<double>& scores, const std::vector<int>& labels);

// Mann-Whitney statistic P(s_pos > s_neg) + 0.5 P(tie), computed from one
// sort with exact tie handling (all partial sums are multiples of 0.5, so
// the result equals the all-pairs enumeration bit for bit). Single-class
// labels -> UndefinedMetricError.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Class C is label 1 (changed), UC is label 0 (unchanged). Zero-denominator
// cases yield 0 and set degenerate.
struct PrfResult {
    double precision_uc = 0, recall_uc = 0, f1_uc = 0;
    double precision_c = 0, recall_c = 0, f1_c = 0;
    bool degenerate = false;
};
PrfResult prf(const std::vector<int>& predictions, const std::vector<int>& labels);

struct TopicDistribution {
    std::map<int, std::size_t> counts;

    std::size_t total() const;
};

TopicDistribution topic_distribution(const std::vector<int>& topic_ids);

// Direct formula on already-normalized vectors: sum p_i log2(p_i / q_i).
// Zero p_i terms contribute nothing; q_i = 0 with p_i > 0 -> ParameterError.
double kl_bits(const std::vector<double>& p, const std::vector<double>& q);

// Add-one smoothing of both counts over the union support, normalized, then
// kl_bits. Two empty distributions give 0.
double kl_divergence_bits(const TopicDistribution& p, const TopicDistribution& q);

// kl_divergence_bits scaled by P's raw total count.
double kl_count_scaled(const TopicDistribution& p, const TopicDistribution& q);

}  // namespace kbfresh
