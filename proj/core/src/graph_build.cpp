#include "kbfresh/graph_build.hpp"

#include <algorithm>
#include <set>

#include "kbfresh/error.hpp"
#include "kbfresh/text.hpp"

namespace kbfresh {

PropertyGraph build_graph(const Entity& entity, int topic, int label,
                          const GraphBuildConfig& config) {
    if (config.vocabulary.size() == 0) throw ParameterError("empty embedding vocabulary");
    if (label != 0 && label != 1) throw ParameterError("label must be 0 or 1");
    if (trim(entity.summary).empty() && entity.triples.empty()) {
        throw ValidationError("degenerate entity " + entity.id +
                              ": no summary and no triples");
    }

    // (sort key, raw predicate, object); dedup on (normalized predicate, object).
    struct Leaf {
        std::string norm_pred;
        std::string object;
        std::string predicate;
    };
    std::vector<Leaf> leaves;
    for (const auto& t : entity.triples) {
        leaves.push_back(Leaf{normalize_name(t.predicate), t.object, t.predicate});
    }
    std::sort(leaves.begin(), leaves.end(), [](const Leaf& a, const Leaf& b) {
        if (a.norm_pred != b.norm_pred) return a.norm_pred < b.norm_pred;
        if (a.object != b.object) return a.object < b.object;
        return a.predicate < b.predicate;
    });
    leaves.erase(std::unique(leaves.begin(), leaves.end(),
                             [](const Leaf& a, const Leaf& b) {
                                 return a.norm_pred == b.norm_pred && a.object == b.object;
                             }),
                 leaves.end());

    PropertyGraph g;
    g.entity_id = entity.id;
    g.label = label;
    g.roles.push_back(NodeRole::Center);
    g.features.push_back(config.vocabulary.embed(entity.summary));
    if (config.include_topic_node) {
        g.roles.push_back(NodeRole::Topic);
        g.features.push_back(config.vocabulary.embed("topic_" + std::to_string(topic)));
    }
    for (const auto& leaf : leaves) {
        g.roles.push_back(NodeRole::Value);
        g.features.push_back(config.vocabulary.embed(leaf.predicate + ": " + leaf.object));
    }

    const std::size_t n = g.roles.size();
    g.adjacency.assign(n * n, 0);
    std::size_t next = 1;
    if (config.include_topic_node) {
        g.set_edge(0, next);
        g.edge_labels[{0, static_cast<int>(next)}] = "topic";
        ++next;
    }
    for (const auto& leaf : leaves) {
        g.set_edge(0, next);
        g.edge_labels[{0, static_cast<int>(next)}] = leaf.predicate;
        ++next;
    }
    validate_graph(g, config.vocabulary.size());
    return g;
}

std::vector<std::pair<std::string, std::size_t>> attribute_histogram(
    const std::vector<PropertyGraph>& graphs) {
    std::map<std::string, std::size_t> counts;
    for (const auto& g : graphs) {
        std::set<std::string> labels;
        for (const auto& [edge, name] : g.edge_labels) labels.insert(name);
        for (const auto& name : labels) ++counts[name];
    }
    std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

DatasetReport build_dataset(const std::vector<SeedEntity>& seeds, Source& source,
                            const std::map<std::string, int>& topics,
                            const std::vector<LabelWindow>& windows,
                            const GraphBuildConfig& config) {
    if (windows.empty()) throw ParameterError("no label windows given");
    for (const auto& seed : seeds) {
        if (!topics.count(seed.entity_id)) {
            throw ParameterError("no topic assignment for entity " + seed.entity_id);
        }
    }

    DatasetReport report;
    const std::size_t total_units = seeds.size() * windows.size();
    std::size_t failed_units = 0;
    for (const auto& seed : seeds) {
        std::optional<Entity> entity;
        std::string fetch_error;
        try {
            entity = source.fetch_entity(seed.entity_name);
        } catch (const Error& e) {
            fetch_error = e.what();
        }
        if (!entity) {
            failed_units += windows.size();
            report.skipped.emplace_back(
                seed.entity_id,
                fetch_error.empty() ? "entity not found: " + seed.entity_name : fetch_error);
            continue;
        }
        for (const auto& window : windows) {
            try {
                const RevisionRecord rec = fetch_revisions(source, seed.entity_name, window);
                const int label = label_entity(rec, window);
                report.graphs.push_back(
                    build_graph(*entity, topics.at(seed.entity_id), label, config));
            } catch (const Error& e) {
                failed_units += 1;
                report.skipped.emplace_back(seed.entity_id, e.what());
            }
        }
    }

    if (total_units > 0 &&
        static_cast<double>(failed_units) >
            config.max_failure_rate * static_cast<double>(total_units)) {
        throw ValidationError("dataset build failed: " + std::to_string(failed_units) + " of " +
                              std::to_string(total_units) + " fetches failed");
    }
    return report;
}

}  // namespace kbfresh
