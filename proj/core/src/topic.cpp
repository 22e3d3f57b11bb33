#include "kbfresh/topic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "kbfresh/error.hpp"
#include "kbfresh/jsonl.hpp"
#include "kbfresh/random.hpp"
#include "kbfresh/text.hpp"

namespace kbfresh {

using nlohmann::json;

std::size_t Vocabulary::index_of(const std::string& token) const {
    if (index_.empty() && !tokens.empty()) {
        for (std::size_t i = 0; i < tokens.size(); ++i) index_[tokens[i]] = i;
    }
    auto it = index_.find(token);
    return it == index_.end() ? npos : it->second;
}

std::vector<double> Vocabulary::embed(const std::string& text) const {
    std::vector<double> vec(tokens.size(), 0.0);
    for (const auto& token : tokenize(text)) {
        const std::size_t i = index_of(token);
        if (i != npos) vec[i] += 1.0;
    }
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < vec.size(); ++i) {
        vec[i] *= idf[i];
        norm_sq += vec[i] * vec[i];
    }
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& v : vec) v *= inv;
    }
    return vec;
}

Vocabulary Vocabulary::with_reserved_topics(std::size_t k) const {
    Vocabulary out;
    out.tokens = tokens;
    out.idf = idf;
    for (std::size_t i = 0; i < k; ++i) {
        const std::string token = "topic_" + std::to_string(i);
        if (index_of(token) != npos) continue;
        out.tokens.push_back(token);
        out.idf.push_back(1.0);
    }
    return out;
}

std::pair<std::vector<std::vector<double>>, Vocabulary> embed_corpus(
    const std::vector<std::pair<std::string, std::string>>& id_text) {
    if (id_text.empty()) throw ValidationError("empty corpus");
    const std::size_t n = id_text.size();

    std::map<std::string, std::size_t> df;
    std::vector<std::set<std::string>> doc_tokens(n);
    for (std::size_t d = 0; d < n; ++d) {
        for (const auto& token : tokenize(id_text[d].second)) doc_tokens[d].insert(token);
        for (const auto& token : doc_tokens[d]) ++df[token];
    }

    const std::size_t df_cap = std::max<std::size_t>(2, n / 2);
    Vocabulary vocab;
    for (const auto& [token, count] : df) {
        if (count < 2 || count > df_cap) continue;
        vocab.tokens.push_back(token);  // std::map iterates lexicographically
        vocab.idf.push_back(std::log((1.0 + static_cast<double>(n)) /
                                     (1.0 + static_cast<double>(count))) +
                            1.0);
    }
    if (vocab.tokens.empty()) {
        throw ValidationError("vocabulary empty after document-frequency pruning");
    }

    std::vector<std::vector<double>> embeddings;
    embeddings.reserve(n);
    for (const auto& [id, text] : id_text) embeddings.push_back(vocab.embed(text));
    return {std::move(embeddings), std::move(vocab)};
}

namespace {

double dist_sq(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

std::size_t nearest_centroid(const std::vector<double>& p,
                             const std::vector<std::vector<double>>& centroids) {
    std::size_t best = 0;
    double best_d = dist_sq(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = dist_sq(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::vector<std::vector<double>> kmeanspp_init(const std::vector<std::vector<double>>& points,
                                               std::size_t k, Rng& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    centroids.push_back(points[uniform_index(rng, points.size())]);

    std::vector<double> min_d(points.size());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d = dist_sq(points[i], centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c) {
                d = std::min(d, dist_sq(points[i], centroids[c]));
            }
            min_d[i] = d;
            total += d;
        }
        std::size_t chosen = points.size();
        if (total > 0.0) {
            const double r = uniform01(rng) * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                cum += min_d[i];
                if (cum > r) {
                    chosen = i;
                    break;
                }
            }
        }
        if (chosen == points.size()) {
            // Rounding left r past the last positive mass (or all distances
            // are zero, which the distinct-points precondition rules out):
            // take the last point with positive distance, else index 0.
            chosen = 0;
            for (std::size_t i = points.size(); i-- > 0;) {
                if (min_d[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        centroids.push_back(points[chosen]);
    }
    return centroids;
}

std::size_t count_distinct(const std::vector<std::vector<double>>& points) {
    std::set<std::vector<double>> s(points.begin(), points.end());
    return s.size();
}

}  // namespace

double sse(const std::vector<std::vector<double>>& points, const ClusterModel& model) {
    if (model.point_assignments.size() != points.size()) {
        throw ParameterError("assignments do not cover all points");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        total += dist_sq(points[i], model.centroids[model.point_assignments[i]]);
    }
    return total;
}

ClusterModel kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    std::uint64_t seed, std::optional<std::size_t> batch_size) {
    if (k < 1) throw ParameterError("k must be at least 1");
    if (points.empty()) throw ParameterError("no points to cluster");
    if (k > count_distinct(points)) {
        throw ParameterError("k exceeds the number of distinct points");
    }
    if (batch_size && *batch_size < 1) throw ParameterError("batch size must be at least 1");

    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.centroids = kmeanspp_init(points, k, rng);
    model.point_assignments.assign(points.size(), 0);

    const double shift_tol = 1e-6;
    const int max_iters = 300;

    if (batch_size) {
        std::vector<std::size_t> counts(k, 0);
        for (int iter = 0; iter < max_iters; ++iter) {
            double max_shift = 0.0;
            for (std::size_t b = 0; b < *batch_size; ++b) {
                const std::size_t i = uniform_index(rng, points.size());
                const std::size_t c = nearest_centroid(points[i], model.centroids);
                counts[c] += 1;
                const double eta = 1.0 / static_cast<double>(counts[c]);
                double shift_sq = 0.0;
                for (std::size_t j = 0; j < points[i].size(); ++j) {
                    const double delta = eta * (points[i][j] - model.centroids[c][j]);
                    model.centroids[c][j] += delta;
                    shift_sq += delta * delta;
                }
                max_shift = std::max(max_shift, std::sqrt(shift_sq));
            }
            if (max_shift < shift_tol) break;
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            model.point_assignments[i] = nearest_centroid(points[i], model.centroids);
        }
        return model;
    }

    double prev_sse = -1.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            model.point_assignments[i] = nearest_centroid(points[i], model.centroids);
        }

        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t a : model.point_assignments) ++sizes[a];
        bool reseeded = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            reseeded = true;
            // Re-seed at the point farthest from its assigned centroid.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (sizes[model.point_assignments[i]] <= 1) continue;
                const double d = dist_sq(points[i], model.centroids[model.point_assignments[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far_d < 0.0) throw InternalError("cannot repopulate empty cluster");
            --sizes[model.point_assignments[far]];
            model.point_assignments[far] = c;
            sizes[c] = 1;
            model.centroids[c] = points[far];
        }

        double max_shift = 0.0;
        std::vector<std::vector<double>> means(k,
                                               std::vector<double>(points[0].size(), 0.0));
        for (std::size_t i = 0; i < points.size(); ++i) {
            const std::size_t c = model.point_assignments[i];
            for (std::size_t j = 0; j < points[i].size(); ++j) means[c][j] += points[i][j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            const double inv = 1.0 / static_cast<double>(sizes[c]);
            for (double& v : means[c]) v *= inv;
            max_shift = std::max(max_shift, std::sqrt(dist_sq(means[c], model.centroids[c])));
            model.centroids[c] = std::move(means[c]);
        }

        const double cur_sse = sse(points, model);
        if (prev_sse >= 0.0 && cur_sse > prev_sse + 1e-9 * std::max(1.0, prev_sse)) {
            throw InternalError("SSE increased during full-batch iteration");
        }
        prev_sse = cur_sse;
        if (max_shift < shift_tol && !reseeded) break;
    }
    return model;
}

ElbowResult choose_k(const std::vector<std::vector<double>>& points, std::size_t k_min,
                     std::size_t k_max, std::uint64_t seed) {
    if (k_min < 1 || k_max < k_min || k_max - k_min + 1 < 3) {
        throw ParameterError("k range must span at least 3 values");
    }
    ElbowResult result;
    std::map<std::size_t, double> sse_by_k;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        const ClusterModel model = kmeans(points, k, seed);
        const double s = sse(points, model);
        sse_by_k[k] = s;
        result.sse_series.emplace_back(k, s);
    }
    double best_dd = 0.0;
    bool have = false;
    for (std::size_t k = k_min + 1; k + 1 <= k_max; ++k) {
        const double dd = sse_by_k[k - 1] - 2.0 * sse_by_k[k] + sse_by_k[k + 1];
        if (!have || dd > best_dd) {
            best_dd = dd;
            result.k = k;
            have = true;
        }
    }
    return result;
}

std::size_t assign_topic(const std::vector<double>& embedding, const ClusterModel& model) {
    if (model.centroids.empty()) throw ParameterError("empty cluster model");
    if (embedding.size() != model.centroids[0].size()) {
        throw ParameterError("embedding dimension does not match cluster model");
    }
    return nearest_centroid(embedding, model.centroids);
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
    auto out = open_output(path);
    for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
        json j;
        j["token"] = vocab.tokens[i];
        j["idf"] = vocab.idf[i];
        out << j.dump() << '\n';
    }
}

Vocabulary load_vocabulary(const std::string& path) {
    Vocabulary vocab;
    for_each_line(path, [&](std::size_t lineno, const std::string& line) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("token") ||
            !j["token"].is_string() || !j.contains("idf") || !j["idf"].is_number()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad vocabulary record");
        }
        vocab.tokens.push_back(j["token"].get<std::string>());
        vocab.idf.push_back(j["idf"].get<double>());
    });
    if (vocab.tokens.empty()) throw ValidationError("vocabulary file is empty: " + path);
    return vocab;
}

void save_topics(const std::map<std::string, std::size_t>& assignments, const std::string& path) {
    auto out = open_output(path);
    for (const auto& [id, topic] : assignments) {
        json j;
        j["id"] = id;
        j["topic"] = topic;
        out << j.dump() << '\n';
    }
}

std::map<std::string, int> load_topics(const std::string& path) {
    std::map<std::string, int> topics;
    for_each_line(path, [&](std::size_t lineno, const std::string& line) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string() ||
            !j.contains("topic") || !j["topic"].is_number_integer()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad topic record");
        }
        topics[j["id"].get<std::string>()] = j["topic"].get<int>();
    });
    return topics;
}

void save_sse_csv(const std::vector<std::pair<std::size_t, double>>& series,
                  const std::string& path) {
    auto out = open_output(path);
    out << "k,sse\n";
    for (const auto& [k, s] : series) out << k << ',' << json(s).dump() << '\n';
}

}  // namespace kbfresh
