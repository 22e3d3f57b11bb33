#pragma once
// Core domain types and file-backed persistence.
//
// Entity dump (kb.jsonl): one JSON object per line,
//   {"id": ..., "name": ..., "summary": ..., "triples": [[predicate, object], ...]}
// with optional "topic" (int) and "revisions" (array of ISO-8601 strings;
// ignored here, consumed by the encyclopedia dump source).
//
// Graph store (graphs.jsonl): header line {"f": <int>, "version": 1}, then one
// graph per line. Feature rows are stored sparsely as [column, value] pairs so
// the round trip is bit-exact.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kbfresh/timeutil.hpp"

namespace kbfresh {

struct Triple {
    std::string subject;    // entity name
    std::string predicate;  // attribute name; compared case-insensitively,
                            // whitespace-normalized
    std::string object;     // value text

    bool valid() const { return !subject.empty() && !predicate.empty() && !object.empty(); }
};

struct Entity {
    std::string id;
    std::string name;
    std::string summary;
    std::vector<Triple> triples;
    std::optional<int> topic;
};

// Immutable after load. Entities keep file order; lookups go through the
// normalized-name index (injective; duplicate keys are skipped on load).
struct KnowledgeBase {
    std::vector<Entity> entities;
    Timestamp snapshot_time = 0;
    std::size_t skipped_records = 0;

    const Entity* find(std::string_view name) const;
    const Entity* find_by_id(std::string_view id) const;
    void add(Entity e);  // load-time only; throws ValidationError on key clash

private:
    std::map<std::string, std::size_t> name_index_;
    std::map<std::string, std::size_t> id_index_;
};

enum class NodeRole { Center, Value, Topic };

std::string role_name(NodeRole r);
NodeRole role_from_name(std::string_view s);

// One entity's hub-and-spoke graph: node 0 is the Center, every edge is
// Center-to-leaf and carries the attribute name that produced it.
struct PropertyGraph {
    std::string entity_id;
    int label = 0;  // 1 = source page modified within the label window
    std::vector<NodeRole> roles;
    std::vector<std::uint8_t> adjacency;            // n*n row-major, binary
    std::vector<std::vector<double>> features;      // n rows of dimension f
    std::map<std::pair<int, int>, std::string> edge_labels;  // key (min,max)

    std::size_t node_count() const { return roles.size(); }
    std::size_t feature_dim() const { return features.empty() ? 0 : features[0].size(); }

    std::uint8_t at(std::size_t i, std::size_t j) const {
        return adjacency[i * node_count() + j];
    }
    void set_edge(std::size_t i, std::size_t j) {
        adjacency[i * node_count() + j] = 1;
        adjacency[j * node_count() + i] = 1;
    }
};

// Checks symmetry/zero diagonal, exactly one Center, at most one Topic,
// Value degree >= 1 and uniform feature dimension. Throws ValidationError
// naming the entity on failure. (Graphs built for the topic-ablation study
// legitimately have no Topic node, hence "at most".)
void validate_graph(const PropertyGraph& g, std::size_t expected_f);

// One dump/API line or body → Entity; nullopt on malformed input or
// invariant violation. Unknown keys (e.g. "revisions") are ignored.
std::optional<Entity> parse_entity_json(const std::string& text);
std::string entity_json_string(const Entity& e);

// Loads the entity dump. Malformed lines, invariant violations and duplicate
// keys are skipped and counted in KnowledgeBase::skipped_records.
KnowledgeBase load_kb(const std::string& path);

void save_kb(const KnowledgeBase& kb, const std::string& path);

void save_graphs(const std::vector<PropertyGraph>& graphs, std::size_t f,
                 const std::string& path);

struct GraphStore {
    std::size_t f = 0;
    std::vector<PropertyGraph> graphs;
};

GraphStore load_graphs(const std::string& path);

}  // namespace kbfresh
