#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kbfresh/encyc.hpp"
#include "kbfresh/error.hpp"
#include "kbfresh/random.hpp"
#include "kbfresh/sync.hpp"

using namespace kbfresh;

namespace {

Triple t(const std::string& s, const std::string& p, const std::string& o) {
    return Triple{s, p, o};
}

Entity entity(const std::string& id, const std::string& name, std::vector<Triple> triples) {
    Entity e;
    e.id = id;
    e.name = name;
    e.summary = name + " summary";
    e.triples = std::move(triples);
    return e;
}

using Pairing = std::vector<std::pair<std::string, std::string>>;

Pairing swap_sides(const Pairing& pairs) {
    Pairing out;
    for (const auto& [a, b] : pairs) out.emplace_back(b, a);
    std::sort(out.begin(), out.end());
    return out;
}

Pairing sorted(Pairing pairs) {
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

// A source that always fails transport, for skip-reason coverage.
class FailingSource final : public Source {
  public:
    std::optional<Entity> fetch_entity(const std::string&) override {
        throw SourceError("transport down", 3);
    }
    std::vector<Timestamp> fetch_revisions(const std::string&, const LabelWindow&) override {
        throw SourceError("transport down", 3);
    }
};

class MapSource final : public Source {
  public:
    void put(Entity e) { entities_[e.name] = std::move(e); }
    std::optional<Entity> fetch_entity(const std::string& name) override {
        auto it = entities_.find(name);
        if (it == entities_.end()) return std::nullopt;
        return it->second;
    }
    std::vector<Timestamp> fetch_revisions(const std::string&, const LabelWindow&) override {
        return {};
    }

  private:
    std::map<std::string, Entity> entities_;
};

}  // namespace

TEST_CASE("match_attributes pairs exact, case-folded, and fuzzy names") {
    const std::string s = "e";
    const std::vector<Triple> kb = {t(s, "length", "68"), t(s, "outflow", "delta"),
                                    t(s, "country", "x")};
    const std::vector<Triple> fresh = {t(s, "Length", "71"), t(s, "Outflow", "delta"),
                                       t(s, "country", "x")};
    const Pairing pairs = sorted(match_attributes(kb, fresh, 2));
    CHECK(pairs == Pairing{{"country", "country"}, {"length", "length"}, {"outflow", "outflow"}});
}

TEST_CASE("match_attributes respects the distance budget") {
    const std::string s = "e";
    const std::vector<Triple> kb = {t(s, "length", "68")};
    const std::vector<Triple> fresh = {t(s, "total length", "68")};
    CHECK(match_attributes(kb, fresh, 2).empty());
    // one typo away still matches
    const std::vector<Triple> fuzzy = {t(s, "lenght", "68")};
    const Pairing pairs = match_attributes(kb, fuzzy, 2);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<std::string, std::string>{"length", "lenght"});
}

TEST_CASE("match_attributes greedy order and tie-break") {
    const std::string s = "e";
    SUBCASE("exact pair wins before a fuzzy pair consumes it") {
        // kb {color}, fresh {color, colour}: color-color at d=0 first.
        const std::vector<Triple> kb = {t(s, "color", "a")};
        const std::vector<Triple> fresh = {t(s, "colour", "a"), t(s, "color", "a")};
        const Pairing pairs = match_attributes(kb, fresh, 2);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0] == std::pair<std::string, std::string>{"color", "color"});
    }
    SUBCASE("equal distances break by the smaller pair") {
        // abc vs {abd, abe}: both d=1, (abc,abd) < (abc,abe).
        const std::vector<Triple> kb = {t(s, "abc", "v")};
        const std::vector<Triple> fresh = {t(s, "abe", "v"), t(s, "abd", "v")};
        const Pairing pairs = match_attributes(kb, fresh, 2);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].second == "abd");
    }
    SUBCASE("swapping the sides mirrors the pairing") {
        const std::vector<Triple> a = {t(s, "length", "1"), t(s, "colour", "2"),
                                       t(s, "region", "3")};
        const std::vector<Triple> b = {t(s, "lengths", "1"), t(s, "color", "2"),
                                       t(s, "legion", "3")};
        const Pairing ab = sorted(match_attributes(a, b, 2));
        const Pairing ba = swap_sides(match_attributes(b, a, 2));
        CHECK(ab == ba);
    }
}

TEST_CASE("diff_entity reports nothing for identical triple sets") {
    const Entity kb = entity("r01", "velar river",
                             {t("velar river", "length", "68 km"), t("velar river", "country", "x")});
    const UpdateReport r = diff_entity(kb, kb, 2);
    CHECK(r.empty());
    CHECK(r.entity_id == "r01");
}

TEST_CASE("diff_entity: equal object sets are omitted even under a predicate respelling") {
    const Entity kb = entity("e1", "e", {t("e", "outflow", "eastern delta")});
    const Entity fresh = entity("e1", "e", {t("e", "Outflow", "eastern delta")});
    CHECK(diff_entity(kb, fresh, 2).empty());
}

TEST_CASE("diff_entity: object change within a matched predicate") {
    const Entity kb = entity("e1", "e", {t("e", "length", "68 km")});
    const Entity fresh = entity("e1", "e", {t("e", "length", "71 km")});
    const UpdateReport r = diff_entity(kb, fresh, 2);
    CHECK(r.added.empty());
    CHECK(r.removed.empty());
    REQUIRE(r.changed.size() == 1);
    CHECK(r.changed[0].first.object == "68 km");
    CHECK(r.changed[0].second.object == "71 km");
    CHECK(r.changed[0].second.subject == "e");
}

TEST_CASE("diff_entity: unmatched groups become added and removed") {
    const Entity kb = entity("e1", "e", {t("e", "first ascent", "1901")});
    const Entity fresh = entity("e1", "e", {t("e", "elevation", "2100 m")});
    const UpdateReport r = diff_entity(kb, fresh, 2);
    REQUIRE(r.added.size() == 1);
    CHECK(r.added[0].predicate == "elevation");
    REQUIRE(r.removed.size() == 1);
    CHECK(r.removed[0].predicate == "first ascent");
    CHECK(r.changed.empty());
}

TEST_CASE("diff_entity: common objects refresh spelling when the predicate text differs") {
    const Entity kb = entity("e1", "e", {t("e", "lenght", "68 km"), t("e", "lenght", "old")});
    const Entity fresh = entity("e1", "e", {t("e", "length", "68 km"), t("e", "length", "new")});
    const UpdateReport r = diff_entity(kb, fresh, 2);
    CHECK(r.added.empty());
    CHECK(r.removed.empty());
    REQUIRE(r.changed.size() == 2);
    // one pair refreshes the shared object's predicate, one rewrites old -> new
    bool saw_refresh = false, saw_value = false;
    for (const auto& [old_t, new_t] : r.changed) {
        if (old_t.object == "68 km") {
            CHECK(new_t.object == "68 km");
            CHECK(old_t.predicate == "lenght");
            CHECK(new_t.predicate == "length");
            saw_refresh = true;
        } else {
            CHECK(old_t.object == "old");
            CHECK(new_t.object == "new");
            saw_value = true;
        }
    }
    CHECK(saw_refresh);
    CHECK(saw_value);
}

TEST_CASE("diff_entity: multi-valued overhang pairs positionally, rest added or removed") {
    SUBCASE("kb larger: sorted pairing then removals") {
        const Entity kb = entity("e1", "e",
                                 {t("e", "color", "red"), t("e", "color", "blue"),
                                  t("e", "color", "green")});
        const Entity fresh = entity("e1", "e", {t("e", "color", "cyan")});
        const UpdateReport r = diff_entity(kb, fresh, 2);
        REQUIRE(r.changed.size() == 1);
        CHECK(r.changed[0].first.object == "blue");  // sorted kb side starts at blue
        CHECK(r.changed[0].second.object == "cyan");
        REQUIRE(r.removed.size() == 2);
        CHECK(r.removed[0].object == "green");
        CHECK(r.removed[1].object == "red");
        CHECK(r.added.empty());
    }
    SUBCASE("fresh larger: pairing then additions") {
        const Entity kb = entity("e1", "e", {t("e", "color", "blue")});
        const Entity fresh = entity("e1", "e", {t("e", "color", "cyan"), t("e", "color", "red")});
        const UpdateReport r = diff_entity(kb, fresh, 2);
        REQUIRE(r.changed.size() == 1);
        CHECK(r.changed[0].first.object == "blue");
        CHECK(r.changed[0].second.object == "cyan");
        REQUIRE(r.added.size() == 1);
        CHECK(r.added[0].object == "red");
        CHECK(r.removed.empty());
    }
}

TEST_CASE("diff_entity subjects carry the kb entity name") {
    const Entity kb = entity("e1", "Velar River", {t("Velar River", "length", "68")});
    const Entity fresh = entity("x", "velar river", {t("velar river", "length", "71"),
                                                     t("velar river", "basin", "chalk")});
    const UpdateReport r = diff_entity(kb, fresh, 2);
    for (const auto& a : r.added) CHECK(a.subject == "Velar River");
    for (const auto& [o, n] : r.changed) {
        CHECK(o.subject == "Velar River");
        CHECK(n.subject == "Velar River");
    }
}

TEST_CASE("apply_update rebuilds in original order") {
    KnowledgeBase kb;
    kb.add(entity("e1", "e",
                  {t("e", "a", "1"), t("e", "b", "2"), t("e", "c", "3")}));
    UpdateReport r;
    r.entity_id = "e1";
    r.removed = {t("e", "a", "1")};
    r.changed = {{t("e", "b", "2"), t("e", "b", "20")}};
    r.added = {t("e", "d", "4")};

    const KnowledgeBase updated = apply_update(kb, r, false);
    const Entity* e = updated.find_by_id("e1");
    REQUIRE(e != nullptr);
    REQUIRE(e->triples.size() == 3);
    CHECK(e->triples[0].predicate == "b");
    CHECK(e->triples[0].object == "20");
    CHECK(e->triples[1].predicate == "c");
    CHECK(e->triples[2].predicate == "d");
    CHECK(e->triples[2].object == "4");

    // input untouched
    CHECK(kb.find_by_id("e1")->triples.size() == 3);
    CHECK(kb.find_by_id("e1")->triples[0].predicate == "a");
}

TEST_CASE("apply_update dry run returns the kb unchanged") {
    KnowledgeBase kb;
    kb.add(entity("e1", "e", {t("e", "a", "1")}));
    UpdateReport r;
    r.entity_id = "e1";
    r.removed = {t("e", "a", "1")};
    const KnowledgeBase out = apply_update(kb, r, true);
    REQUIRE(out.find_by_id("e1") != nullptr);
    CHECK(out.find_by_id("e1")->triples.size() == 1);
}

TEST_CASE("apply_update rejects an unknown entity id") {
    KnowledgeBase kb;
    kb.add(entity("e1", "e", {t("e", "a", "1")}));
    UpdateReport r;
    r.entity_id = "zz99";
    CHECK_THROWS_AS(apply_update(kb, r, false), ValidationError);
}

TEST_CASE("diff then apply then re-diff is empty on randomized pairs") {
    const std::vector<std::string> preds = {"length", "lenght",  "colour", "color", "region",
                                            "area",   "status", "population"};
    const std::vector<std::string> objs = {"1", "2", "3", "red", "blue", "cyan", "68 km", "x"};
    Rng rng(20240814);
    for (int it = 0; it < 100; ++it) {
        auto random_triples = [&](const std::string& name) {
            std::set<std::pair<std::string, std::string>> chosen;
            const std::size_t count = 1 + uniform_index(rng, 6);
            while (chosen.size() < count) {
                chosen.emplace(preds[uniform_index(rng, preds.size())],
                               objs[uniform_index(rng, objs.size())]);
            }
            std::vector<Triple> out;
            for (const auto& [p, o] : chosen) out.push_back(t(name, p, o));
            shuffle_deterministic(out, rng);
            return out;
        };
        const Entity kb_e = entity("e1", "e", random_triples("e"));
        const Entity fresh_e = entity("e1", "e", random_triples("e"));

        KnowledgeBase kb;
        kb.add(kb_e);
        const UpdateReport r = diff_entity(kb_e, fresh_e, 2);
        const KnowledgeBase updated = apply_update(kb, r, false);
        const UpdateReport again = diff_entity(*updated.find_by_id("e1"), fresh_e, 2);
        CAPTURE(it);
        CHECK(again.empty());
    }
}

TEST_CASE("sync_pipeline fetches only label-1 predictions, once per id") {
    KnowledgeBase kb;
    kb.add(entity("r01", "velar river", {t("velar river", "length", "68 km")}));
    kb.add(entity("r02", "okorro river", {t("okorro river", "length", "12 km")}));
    MapSource source;
    source.put(entity("src", "velar river", {t("velar river", "length", "71 km")}));
    source.put(entity("src", "okorro river", {t("okorro river", "length", "99 km")}));

    SyncConfig config;
    const SyncResult result = sync_pipeline(
        kb, {{"r01", 1}, {"r02", 0}, {"r01", 1}}, source, config);

    REQUIRE(result.reports.size() == 1);
    CHECK(result.reports[0].entity_id == "r01");
    REQUIRE(result.reports[0].changed.size() == 1);
    CHECK(result.reports[0].changed[0].second.object == "71 km");
    // only r01 was applied; r02 was never fetched
    CHECK(result.kb.find_by_id("r01")->triples[0].object == "71 km");
    CHECK(result.kb.find_by_id("r02")->triples[0].object == "12 km");
}

TEST_CASE("sync_pipeline records skip reasons instead of aborting") {
    KnowledgeBase kb;
    kb.add(entity("r01", "velar river", {t("velar river", "length", "68 km")}));

    SUBCASE("prediction id missing from the kb") {
        MapSource source;
        const SyncResult result = sync_pipeline(kb, {{"zz99", 1}}, source, SyncConfig{});
        REQUIRE(result.reports.size() == 1);
        REQUIRE(result.reports[0].skipped_reason.has_value());
        CHECK(result.reports[0].entity_id == "zz99");
        CHECK(result.kb.find_by_id("r01")->triples[0].object == "68 km");
    }
    SUBCASE("entity absent at the source") {
        MapSource source;  // empty
        const SyncResult result = sync_pipeline(kb, {{"r01", 1}}, source, SyncConfig{});
        REQUIRE(result.reports.size() == 1);
        REQUIRE(result.reports[0].skipped_reason.has_value());
    }
    SUBCASE("transport failure") {
        FailingSource source;
        const SyncResult result = sync_pipeline(kb, {{"r01", 1}}, source, SyncConfig{});
        REQUIRE(result.reports.size() == 1);
        REQUIRE(result.reports[0].skipped_reason.has_value());
        CHECK(result.kb.find_by_id("r01")->triples[0].object == "68 km");
    }
}

TEST_CASE("sync_pipeline dry run reports but never mutates") {
    KnowledgeBase kb;
    kb.add(entity("r01", "velar river", {t("velar river", "length", "68 km")}));
    MapSource source;
    source.put(entity("src", "velar river", {t("velar river", "length", "71 km")}));

    SyncConfig config;
    config.dry_run = true;
    const SyncResult result = sync_pipeline(kb, {{"r01", 1}}, source, config);
    REQUIRE(result.reports.size() == 1);
    CHECK(result.reports[0].changed.size() == 1);
    CHECK(result.kb.find_by_id("r01")->triples[0].object == "68 km");
}

TEST_CASE("sync_pipeline against the dump fixtures matches the designed edits") {
    const KnowledgeBase kb = load_kb(std::string(FIXTURE_DIR) + "/kb.jsonl");
    DumpSource source(std::string(FIXTURE_DIR) + "/source.jsonl");
    const SyncResult result = sync_pipeline(
        kb, {{"r01", 1}, {"l01", 1}, {"m01", 1}, {"r03", 1}, {"c01", 1}}, source, SyncConfig{});
    REQUIRE(result.reports.size() == 5);

    // r01: length 68 -> 71; the outflow respelling is invisible
    CHECK(result.reports[0].changed.size() == 1);
    CHECK(result.reports[0].changed[0].second.object == "71 km");
    CHECK(result.reports[0].added.empty());
    CHECK(result.reports[0].removed.empty());
    // l01: one change plus one addition
    CHECK(result.reports[1].changed.size() == 1);
    CHECK(result.reports[1].added.size() == 1);
    // m01: one removal
    CHECK(result.reports[2].removed.size() == 1);
    CHECK(result.reports[2].added.empty());
    // r03: rename beyond the budget splits into remove + add
    CHECK(result.reports[3].removed.size() == 1);
    CHECK(result.reports[3].added.size() == 1);
    // c01: one addition
    CHECK(result.reports[4].added.size() == 1);
    CHECK(result.reports[4].changed.empty());

    CHECK(result.kb.find_by_id("r01")->triples[0].object == "71 km");
    CHECK(result.kb.find_by_id("r01")->triples[1].predicate == "outflow");
}

TEST_CASE("save_reports emits one json line per report") {
    UpdateReport full;
    full.entity_id = "r01";
    full.added = {t("e", "died", "1921")};
    full.changed = {{t("e", "length", "68"), t("e", "length", "71")}};
    full.removed = {t("e", "first ascent", "1901")};
    UpdateReport skipped;
    skipped.entity_id = "zz99";
    skipped.skipped_reason = "not in the knowledge base";

    const std::string path = "/tmp/kbfresh_reports_test.jsonl";
    save_reports({full, skipped}, path);
    std::ifstream in(path);
    std::string line1, line2, extra;
    REQUIRE(std::getline(in, line1));
    REQUIRE(std::getline(in, line2));
    CHECK_FALSE(std::getline(in, extra));
    CHECK(line1.find("\"entity_id\":\"r01\"") != std::string::npos);
    CHECK(line1.find("[[\"length\",\"68\"],[\"length\",\"71\"]]") != std::string::npos);
    CHECK(line1.find("skipped_reason") == std::string::npos);
    CHECK(line2.find("\"skipped_reason\":\"not in the knowledge base\"") != std::string::npos);
    std::remove(path.c_str());
}
