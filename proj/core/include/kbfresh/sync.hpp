#pragma once
// Triple-level refresh of stale entities: fuzzy predicate matching between
// the KB copy and freshly fetched triples, a group-level diff, and an
// auditable apply step with dry-run support.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kbfresh/encyc.hpp"
#include "kbfresh/kb_model.hpp"

namespace kbfresh {

struct UpdateReport {
    std::string entity_id;
    std::vector<Triple> added;
    std::vector<std::pair<Triple, Triple>> changed;  // (old, new)
    std::vector<Triple> removed;
    std::optional<std::string> skipped_reason;

    bool empty() const {
        return added.empty() && changed.empty() && removed.empty() && !skipped_reason;
    }
};

// Greedy minimal-distance pairing of the distinct normalized predicate names:
// repeatedly take the globally closest unmatched pair with distance <=
// max_dist; equal distances break by orientation-independent lexicographic
// pair order, so swapping the argument sides mirrors the pairing exactly.
std::vector<std::pair<std::string, std::string>> match_attributes(
    const std::vector<Triple>& kb_triples, const std::vector<Triple>& fresh_triples,
    std::size_t max_dist);

// Diff against the fresh entity, grouped by matched predicate:
//   - matched groups with identical object sets are omitted (the KB keeps its
//     predicate spelling);
//   - otherwise common objects refresh spelling when the predicate text
//     differs, leftover objects pair positionally (sorted) as changed, and
//     the overhang becomes added/removed;
//   - unmatched fresh groups are added, unmatched KB groups removed.
// All report triples carry the KB entity's name as subject.
UpdateReport diff_entity(const Entity& kb_entity, const Entity& fresh_entity,
                         std::size_t max_dist);

// Rebuilds the entity's triple list in original order (drop removed, replace
// changed, append added). dry_run returns the KB unchanged. Unknown
// report.entity_id -> ValidationError.
KnowledgeBase apply_update(const KnowledgeBase& kb, const UpdateReport& report, bool dry_run);

struct SyncConfig {
    std::size_t max_dist = 2;
    bool dry_run = false;
};

struct SyncResult {
    std::vector<UpdateReport> reports;  // one per distinct entity predicted stale
    KnowledgeBase kb;                   // updated copy (input copy when dry_run)
};

// predictions: (entity_id, predicted label). Only label-1 entities are
// fetched and diffed, first occurrence per id; fetch failures produce a
// report with skipped_reason instead of aborting.
SyncResult sync_pipeline(const KnowledgeBase& kb,
                         const std::vector<std::pair<std::string, int>>& predictions,
                         Source& source, const SyncConfig& config);

void save_reports(const std::vector<UpdateReport>& reports, const std::string& path);

}  // namespace kbfresh
