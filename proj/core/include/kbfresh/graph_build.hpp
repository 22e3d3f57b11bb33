#pragma once
// Per-entity property-graph construction: center node carrying the summary
// embedding, attribute-labeled edges to value leaves, an optional topic node,
// and the binary modification label.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kbfresh/encyc.hpp"
#include "kbfresh/ingest.hpp"
#include "kbfresh/kb_model.hpp"
#include "kbfresh/topic.hpp"

namespace kbfresh {

struct GraphBuildConfig {
    Vocabulary vocabulary;          // shared feature space; must be non-empty
    bool include_topic_node = true;
    double max_failure_rate = 0.2;  // build_dataset aborts above this
};

// Node order: Center, Topic (when enabled), then Value nodes sorted by
// (normalized predicate, object). Duplicate (predicate, object) pairs
// collapse to one node. Star topology: every non-center node connects only
// to the center. Value features embed "predicate: object"; the topic feature
// embeds the reserved token "topic_<id>". Entity with neither summary nor
// triples → ValidationError.
PropertyGraph build_graph(const Entity& entity, int topic, int label,
                          const GraphBuildConfig& config);

// Number of graphs containing each edge label at least once, descending by
// count then ascending by name.
std::vector<std::pair<std::string, std::size_t>> attribute_histogram(
    const std::vector<PropertyGraph>& graphs);

struct DatasetReport {
    std::vector<PropertyGraph> graphs;
    std::vector<std::pair<std::string, std::string>> skipped;  // (entity_id, reason)
};

// One labeled graph per (seed, window). Fetch or build failures are recorded
// in `skipped`; a failure rate above config.max_failure_rate aborts with
// ValidationError. Every seed must have a topic assignment.
DatasetReport build_dataset(const std::vector<SeedEntity>& seeds, Source& source,
                            const std::map<std::string, int>& topics,
                            const std::vector<LabelWindow>& windows,
                            const GraphBuildConfig& config);

}  // namespace kbfresh
