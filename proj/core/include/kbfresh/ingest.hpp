#pragma once
// Query-log ingestion: sentence validation, n-gram candidate generation and
// minimum-edit-distance matching against the knowledge base, producing the
// update seed list.
//
// Log file: JSON-lines {"text": ..., "ts": optional ISO-8601} or plain text
// one sentence per line; the format is auto-detected from the first
// non-empty line.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kbfresh/kb_model.hpp"
#include "kbfresh/timeutil.hpp"

namespace kbfresh {

struct QuerySentence {
    std::string text;
    std::optional<Timestamp> timestamp;
};

struct SeedEntity {
    std::string entity_id;
    std::string entity_name;     // carried so downstream stages can fetch by name
    std::string matched_surface;
    std::size_t frequency = 0;
    std::size_t edit_distance = 0;
};

using NounDetector = std::function<bool(const std::string&)>;

// Closed-class pronoun lexicon plus a "non-stopword token of length >= 3"
// heuristic standing in for a POS tagger.
NounDetector default_noun_detector();

// True iff the trimmed text is at least 10 characters (code points, spaces
// included) and the detector accepts at least one token.
bool validate_sentence(const std::string& text, const NounDetector& detector);

// Contiguous token windows of size 1..n_max, smallest windows first,
// deduplicated keeping the first occurrence.
std::vector<std::string> ngram_candidates(const std::string& text, std::size_t n_max);

// Closest KB entity by edit distance over normalized names, if within
// max_dist. Ties: lexicographically smallest name, then smallest id.
struct Match {
    std::string entity_id;
    std::size_t distance;
};
std::optional<Match> match_entity(const std::string& candidate, const KnowledgeBase& kb,
                                  std::size_t max_dist);

struct ExtractConfig {
    std::size_t n_max = 4;
    std::size_t max_dist = 2;   // cap; per-candidate threshold scales with length
    NounDetector noun_detector = default_noun_detector();
};

// Effective matching threshold for a candidate: min(cap, max(1, len/8)),
// so short candidates do not absorb spurious edits.
std::size_t scaled_max_dist(std::size_t candidate_len, std::size_t cap);

// Full seed-list pass: validate, segment, match, aggregate by entity with
// summed frequency. Output sorted by frequency descending, then name, then id.
std::vector<SeedEntity> extract_seeds(const std::vector<QuerySentence>& log,
                                      const KnowledgeBase& kb, const ExtractConfig& config);

std::vector<QuerySentence> load_log(const std::string& path);

void save_seeds(const std::vector<SeedEntity>& seeds, const std::string& path);
std::vector<SeedEntity> load_seeds(const std::string& path);

}  // namespace kbfresh
