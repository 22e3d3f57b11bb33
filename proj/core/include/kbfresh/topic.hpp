#pragma once
// Unsupervised topic assignment: TF-IDF summary embeddings, k-means with
// k-means++ init, elbow-rule k selection, nearest-centroid assignment.
//
// The corpus vocabulary doubles as the graph feature space; reserved tokens
// topic_<id> are appended after clustering so each topic owns a distinct
// embedding axis.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kbfresh {

struct Vocabulary {
    // Lexicographic corpus tokens first, then reserved topic tokens in id
    // order. idf is parallel to tokens.
    std::vector<std::string> tokens;
    std::vector<double> idf;

    std::size_t size() const { return tokens.size(); }
    std::size_t index_of(const std::string& token) const;  // npos if absent

    // Raw-count TF times IDF, L2-normalized; zero vector when no token hits.
    std::vector<double> embed(const std::string& text) const;

    // Copy with topic_0..topic_{k-1} appended (idf 1.0), skipping tokens
    // already present.
    Vocabulary with_reserved_topics(std::size_t k) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  private:
    mutable std::map<std::string, std::size_t> index_;  // built lazily
};

// Vocabulary = tokens with 2 <= df <= max(2, floor(N/2)), idf = ln((1+N)/(1+df)) + 1.
// Embeddings parallel the input order. Throws ValidationError when pruning
// leaves no tokens.
std::pair<std::vector<std::vector<double>>, Vocabulary> embed_corpus(
    const std::vector<std::pair<std::string, std::string>>& id_text);

struct ClusterModel {
    std::size_t k = 0;
    std::vector<std::vector<double>> centroids;       // k x f
    std::vector<std::size_t> point_assignments;       // parallel to input points
    std::map<std::string, std::size_t> assignments;   // entity_id -> cluster, filled by caller
};

double sse(const std::vector<std::vector<double>>& points, const ClusterModel& model);

// Full-batch Lloyd (default) or mini-batch when batch_size is set. k-means++
// init from the given seed. Stops when the max centroid shift drops below
// 1e-6 or after 300 iterations. Full-batch SSE is asserted non-increasing.
ClusterModel kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    std::uint64_t seed, std::optional<std::size_t> batch_size = std::nullopt);

struct ElbowResult {
    std::size_t k = 0;
    std::vector<std::pair<std::size_t, double>> sse_series;  // (k, sse) ascending k
};

// Runs kmeans for each k in [k_min, k_max] and picks the interior k
// maximizing SSE(k-1) - 2*SSE(k) + SSE(k+1); ties go to the smallest k.
// Range must span at least 3 values.
ElbowResult choose_k(const std::vector<std::vector<double>>& points, std::size_t k_min,
                     std::size_t k_max, std::uint64_t seed);

// Index of the nearest centroid (Euclidean); ties to the smallest index.
std::size_t assign_topic(const std::vector<double>& embedding, const ClusterModel& model);

void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);

void save_topics(const std::map<std::string, std::size_t>& assignments, const std::string& path);
std::map<std::string, int> load_topics(const std::string& path);

void save_sse_csv(const std::vector<std::pair<std::size_t, double>>& series,
                  const std::string& path);

}  // namespace kbfresh
