#include "kbfresh/ingest.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kbfresh/error.hpp"
#include "kbfresh/jsonl.hpp"
#include "kbfresh/text.hpp"
#include "json.hpp"

namespace kbfresh {

namespace {

using nlohmann::json;

const std::set<std::string>& pronouns() {
    static const std::set<std::string> set = {
        "i",       "you",      "he",      "she",      "it",       "we",
        "they",    "me",       "him",     "her",      "us",       "them",
        "mine",    "yours",    "hers",    "ours",     "theirs",   "myself",
        "himself", "herself",  "itself",  "who",      "whom",     "whose",
        "which",   "what",     "this",    "that",     "these",    "those",
        "someone", "something", "anyone", "anything", "everyone", "everything",
        "nobody",  "nothing",  "somebody", "anybody", "everybody"};
    return set;
}

const std::set<std::string>& stopwords() {
    static const std::set<std::string> set = {
        "the",  "a",     "an",    "and",  "or",    "but",  "if",    "of",
        "in",   "on",    "at",    "to",   "for",   "with", "by",    "from",
        "as",   "is",    "are",   "was",  "were",  "be",   "been",  "being",
        "do",   "does",  "did",   "have", "has",   "had",  "not",   "no",
        "so",   "than",  "then",  "too",  "very",  "can",  "could", "will",
        "would", "shall", "should", "may", "might", "must", "about", "into",
        "over", "under", "again", "once", "here",  "there", "when", "where",
        "why",  "how",   "all",   "any",  "both",  "each", "few",   "more",
        "most", "other", "some",  "such", "only",  "own",  "same",  "just",
        "also", "up",    "down",  "out",  "off",   "its"};
    return set;
}

}  // namespace

NounDetector default_noun_detector() {
    return [](const std::string& token) {
        if (pronouns().count(token)) return true;
        if (stopwords().count(token)) return false;
        return utf8_length(token) >= 3;
    };
}

bool validate_sentence(const std::string& text, const NounDetector& detector) {
    const std::string trimmed = trim(text);
    if (utf8_length(trimmed) < 10) return false;
    for (const auto& token : tokenize(trimmed)) {
        if (detector(token)) return true;
    }
    return false;
}

std::vector<std::string> ngram_candidates(const std::string& text, std::size_t n_max) {
    const std::vector<std::string> tokens = tokenize(text);
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t size = 1; size <= n_max && size <= tokens.size(); ++size) {
        for (std::size_t start = 0; start + size <= tokens.size(); ++start) {
            std::string gram = tokens[start];
            for (std::size_t j = 1; j < size; ++j) {
                gram += ' ';
                gram += tokens[start + j];
            }
            if (seen.insert(gram).second) out.push_back(std::move(gram));
        }
    }
    return out;
}

std::optional<Match> match_entity(const std::string& candidate, const KnowledgeBase& kb,
                                  std::size_t max_dist) {
    const std::string norm = normalize_name(candidate);
    if (norm.empty()) return std::nullopt;

    std::optional<Match> best;
    std::string best_name;
    for (const auto& entity : kb.entities) {
        const std::string name = normalize_name(entity.name);
        // Cheap lower bound: distance >= length difference.
        const std::size_t la = norm.size(), lb = name.size();
        if ((la > lb ? la - lb : lb - la) > max_dist) continue;
        const std::size_t d = edit_distance(norm, name);
        if (d > max_dist) continue;
        if (!best || d < best->distance ||
            (d == best->distance &&
             (name < best_name || (name == best_name && entity.id < best->entity_id)))) {
            best = Match{entity.id, d};
            best_name = name;
        }
    }
    return best;
}

std::size_t scaled_max_dist(std::size_t candidate_len, std::size_t cap) {
    const std::size_t by_len = std::max<std::size_t>(1, candidate_len / 8);
    return std::min(cap, by_len);
}

std::vector<SeedEntity> extract_seeds(const std::vector<QuerySentence>& log,
                                      const KnowledgeBase& kb, const ExtractConfig& config) {
    struct Agg {
        std::string name;
        std::string surface;
        std::size_t freq = 0;
        std::size_t dist = 0;
    };
    std::map<std::string, Agg> by_id;

    for (const auto& sentence : log) {
        if (!validate_sentence(sentence.text, config.noun_detector)) continue;
        for (const auto& candidate : ngram_candidates(sentence.text, config.n_max)) {
            const std::string norm = normalize_name(candidate);
            if (norm.empty()) continue;
            const std::size_t eff = scaled_max_dist(utf8_length(norm), config.max_dist);
            const auto match = match_entity(candidate, kb, eff);
            if (!match) continue;
            auto& agg = by_id[match->entity_id];
            if (agg.freq == 0) {
                const Entity* e = kb.find_by_id(match->entity_id);
                agg.name = e ? e->name : match->entity_id;
                agg.surface = candidate;
                agg.dist = match->distance;
            } else if (match->distance < agg.dist) {
                agg.surface = candidate;
                agg.dist = match->distance;
            }
            agg.freq += 1;
        }
    }

    std::vector<SeedEntity> seeds;
    seeds.reserve(by_id.size());
    for (const auto& [id, agg] : by_id) {
        seeds.push_back(SeedEntity{id, agg.name, agg.surface, agg.freq, agg.dist});
    }
    std::sort(seeds.begin(), seeds.end(), [](const SeedEntity& a, const SeedEntity& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        if (a.entity_name != b.entity_name) return a.entity_name < b.entity_name;
        return a.entity_id < b.entity_id;
    });
    return seeds;
}

std::vector<QuerySentence> load_log(const std::string& path) {
    std::vector<QuerySentence> log;
    bool decided = false;
    bool jsonl = false;
    for_each_line(path, [&](std::size_t lineno, const std::string& line) {
        if (!decided) {
            jsonl = !line.empty() && line.front() == '{';
            decided = true;
        }
        if (!jsonl) {
            log.push_back(QuerySentence{line, std::nullopt});
            return;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing \"text\" field");
        }
        QuerySentence s;
        s.text = j["text"].get<std::string>();
        if (j.contains("ts") && !j["ts"].is_null()) {
            if (!j["ts"].is_string()) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": \"ts\" must be a string");
            }
            s.timestamp = parse_iso8601(j["ts"].get<std::string>());
        }
        log.push_back(std::move(s));
    });
    return log;
}

void save_seeds(const std::vector<SeedEntity>& seeds, const std::string& path) {
    auto out = open_output(path);
    for (const auto& seed : seeds) {
        json j;
        j["entity_id"] = seed.entity_id;
        j["entity_name"] = seed.entity_name;
        j["matched_surface"] = seed.matched_surface;
        j["frequency"] = seed.frequency;
        j["edit_distance"] = seed.edit_distance;
        out << j.dump() << '\n';
    }
}

std::vector<SeedEntity> load_seeds(const std::string& path) {
    std::vector<SeedEntity> seeds;
    for_each_line(path, [&](std::size_t lineno, const std::string& line) {
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
        }
        try {
            SeedEntity s;
            s.entity_id = j.at("entity_id").get<std::string>();
            s.entity_name = j.at("entity_name").get<std::string>();
            s.matched_surface = j.at("matched_surface").get<std::string>();
            s.frequency = j.at("frequency").get<std::size_t>();
            s.edit_distance = j.at("edit_distance").get<std::size_t>();
            seeds.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return seeds;
}

}  // namespace kbfresh
