#include "kbfresh/sync.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "kbfresh/error.hpp"
#include "kbfresh/jsonl.hpp"
#include "kbfresh/text.hpp"

namespace kbfresh {

using nlohmann::json;

namespace {

// One side's triples bucketed by normalized predicate. Objects are kept as a
// sorted set; `raw` is the first spelling encountered.
struct Group {
    std::string raw;
    std::vector<std::string> objects;
};

std::map<std::string, Group> group_triples(const std::vector<Triple>& triples) {
    std::map<std::string, Group> groups;
    for (const auto& t : triples) {
        auto [it, inserted] = groups.try_emplace(normalize_name(t.predicate));
        if (inserted) it->second.raw = t.predicate;
        it->second.objects.push_back(t.object);
    }
    for (auto& [key, g] : groups) {
        std::sort(g.objects.begin(), g.objects.end());
        g.objects.erase(std::unique(g.objects.begin(), g.objects.end()), g.objects.end());
    }
    return groups;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> match_attributes(
    const std::vector<Triple>& kb_triples, const std::vector<Triple>& fresh_triples,
    std::size_t max_dist) {
    std::vector<std::string> kb_keys, fresh_keys;
    for (const auto& [key, g] : group_triples(kb_triples)) kb_keys.push_back(key);
    for (const auto& [key, g] : group_triples(fresh_triples)) fresh_keys.push_back(key);

    struct Candidate {
        std::size_t d;
        // Orientation-independent tie key: pairing must mirror exactly when
        // the kb/fresh sides are swapped.
        std::string lo, hi;
        std::size_t i, j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < kb_keys.size(); ++i) {
        for (std::size_t j = 0; j < fresh_keys.size(); ++j) {
            const std::size_t d = edit_distance(kb_keys[i], fresh_keys[j]);
            if (d > max_dist) continue;
            candidates.push_back(Candidate{d, std::min(kb_keys[i], fresh_keys[j]),
                                           std::max(kb_keys[i], fresh_keys[j]), i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.lo != b.lo) return a.lo < b.lo;
        if (a.hi != b.hi) return a.hi < b.hi;
        if (kb_keys[a.i] != kb_keys[b.i]) return kb_keys[a.i] < kb_keys[b.i];
        return fresh_keys[a.j] < fresh_keys[b.j];
    });

    std::vector<char> kb_used(kb_keys.size(), 0), fresh_used(fresh_keys.size(), 0);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& c : candidates) {
        if (kb_used[c.i] || fresh_used[c.j]) continue;
        kb_used[c.i] = fresh_used[c.j] = 1;
        pairs.emplace_back(kb_keys[c.i], fresh_keys[c.j]);
    }
    return pairs;
}

UpdateReport diff_entity(const Entity& kb_entity, const Entity& fresh_entity,
                         std::size_t max_dist) {
    UpdateReport report;
    report.entity_id = kb_entity.id;
    const std::string& subject = kb_entity.name;

    const auto kb_groups = group_triples(kb_entity.triples);
    const auto fresh_groups = group_triples(fresh_entity.triples);
    auto pairs = match_attributes(kb_entity.triples, fresh_entity.triples, max_dist);
    std::sort(pairs.begin(), pairs.end());

    std::set<std::string> kb_matched, fresh_matched;
    for (const auto& [kb_key, fresh_key] : pairs) {
        kb_matched.insert(kb_key);
        fresh_matched.insert(fresh_key);
        const Group& kg = kb_groups.at(kb_key);
        const Group& fg = fresh_groups.at(fresh_key);
        if (kg.objects == fg.objects) continue;  // KB keeps its spelling

        std::vector<std::string> common, kb_only, fresh_only;
        std::set_intersection(kg.objects.begin(), kg.objects.end(), fg.objects.begin(),
                              fg.objects.end(), std::back_inserter(common));
        std::set_difference(kg.objects.begin(), kg.objects.end(), fg.objects.begin(),
                            fg.objects.end(), std::back_inserter(kb_only));
        std::set_difference(fg.objects.begin(), fg.objects.end(), kg.objects.begin(),
                            kg.objects.end(), std::back_inserter(fresh_only));

        if (kg.raw != fg.raw) {
            for (const auto& obj : common) {
                report.changed.emplace_back(Triple{subject, kg.raw, obj},
                                            Triple{subject, fg.raw, obj});
            }
        }
        const std::size_t n_pairs = std::min(kb_only.size(), fresh_only.size());
        for (std::size_t i = 0; i < n_pairs; ++i) {
            report.changed.emplace_back(Triple{subject, kg.raw, kb_only[i]},
                                        Triple{subject, fg.raw, fresh_only[i]});
        }
        for (std::size_t i = n_pairs; i < fresh_only.size(); ++i) {
            report.added.push_back(Triple{subject, fg.raw, fresh_only[i]});
        }
        for (std::size_t i = n_pairs; i < kb_only.size(); ++i) {
            report.removed.push_back(Triple{subject, kg.raw, kb_only[i]});
        }
    }

    for (const auto& [key, g] : kb_groups) {
        if (kb_matched.count(key)) continue;
        for (const auto& obj : g.objects) report.removed.push_back(Triple{subject, g.raw, obj});
    }
    for (const auto& [key, g] : fresh_groups) {
        if (fresh_matched.count(key)) continue;
        for (const auto& obj : g.objects) report.added.push_back(Triple{subject, g.raw, obj});
    }
    return report;
}

KnowledgeBase apply_update(const KnowledgeBase& kb, const UpdateReport& report, bool dry_run) {
    const Entity* target = kb.find_by_id(report.entity_id);
    if (!target) throw ValidationError("entity not in KB: " + report.entity_id);
    KnowledgeBase updated = kb;
    if (dry_run || report.empty()) return updated;

    using Key = std::pair<std::string, std::string>;  // (normalized predicate, object)
    auto key_of = [](const Triple& t) { return Key{normalize_name(t.predicate), t.object}; };
    std::set<Key> removed;
    for (const auto& t : report.removed) removed.insert(key_of(t));
    std::map<Key, Triple> changed;
    for (const auto& [old_t, new_t] : report.changed) changed[key_of(old_t)] = new_t;

    Entity& entity = updated.entities[static_cast<std::size_t>(target - kb.entities.data())];
    std::vector<Triple> rebuilt;
    rebuilt.reserve(entity.triples.size() + report.added.size());
    for (const auto& t : entity.triples) {
        const Key key = key_of(t);
        if (removed.count(key)) continue;
        auto it = changed.find(key);
        if (it != changed.end()) {
            rebuilt.push_back(Triple{entity.name, it->second.predicate, it->second.object});
        } else {
            rebuilt.push_back(t);
        }
    }
    for (const auto& t : report.added) {
        rebuilt.push_back(Triple{entity.name, t.predicate, t.object});
    }
    entity.triples = std::move(rebuilt);
    return updated;
}

SyncResult sync_pipeline(const KnowledgeBase& kb,
                         const std::vector<std::pair<std::string, int>>& predictions,
                         Source& source, const SyncConfig& config) {
    SyncResult result;
    result.kb = kb;
    std::set<std::string> processed;
    for (const auto& [entity_id, label] : predictions) {
        if (label != 1 || !processed.insert(entity_id).second) continue;

        UpdateReport report;
        report.entity_id = entity_id;
        const Entity* kb_entity = result.kb.find_by_id(entity_id);
        if (!kb_entity) {
            report.skipped_reason = "entity not in KB: " + entity_id;
            result.reports.push_back(std::move(report));
            continue;
        }
        std::optional<Entity> fresh;
        try {
            fresh = source.fetch_entity(kb_entity->name);
        } catch (const Error& e) {
            report.skipped_reason = e.what();
            result.reports.push_back(std::move(report));
            continue;
        }
        if (!fresh) {
            report.skipped_reason = "entity not found in source: " + kb_entity->name;
            result.reports.push_back(std::move(report));
            continue;
        }
        report = diff_entity(*kb_entity, *fresh, config.max_dist);
        result.kb = apply_update(result.kb, report, config.dry_run);
        result.reports.push_back(std::move(report));
    }
    return result;
}

void save_reports(const std::vector<UpdateReport>& reports, const std::string& path) {
    auto out = open_output(path);
    for (const auto& r : reports) {
        json j;
        j["entity_id"] = r.entity_id;
        json added = json::array();
        for (const auto& t : r.added) added.push_back(json::array({t.predicate, t.object}));
        j["added"] = std::move(added);
        json changed = json::array();
        for (const auto& [old_t, new_t] : r.changed) {
            changed.push_back(json::array({json::array({old_t.predicate, old_t.object}),
                                           json::array({new_t.predicate, new_t.object})}));
        }
        j["changed"] = std::move(changed);
        json removed = json::array();
        for (const auto& t : r.removed) removed.push_back(json::array({t.predicate, t.object}));
        j["removed"] = std::move(removed);
        if (r.skipped_reason) j["skipped_reason"] = *r.skipped_reason;
        out << j.dump() << '\n';
    }
}

}  // namespace kbfresh
