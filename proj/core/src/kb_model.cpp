#include "kbfresh/kb_model.hpp"

#include <sys/stat.h>

#include "json.hpp"
#include "kbfresh/jsonl.hpp"
#include "kbfresh/text.hpp"

namespace kbfresh {

using nlohmann::json;

const Entity* KnowledgeBase::find(std::string_view name) const {
    auto it = name_index_.find(normalize_name(name));
    return it == name_index_.end() ? nullptr : &entities[it->second];
}

const Entity* KnowledgeBase::find_by_id(std::string_view id) const {
    auto it = id_index_.find(std::string(id));
    return it == id_index_.end() ? nullptr : &entities[it->second];
}

void KnowledgeBase::add(Entity e) {
    std::string key = normalize_name(e.name);
    if (key.empty()) throw ValidationError("entity with empty name");
    if (name_index_.count(key)) throw ValidationError("duplicate entity name key: " + key);
    if (id_index_.count(e.id)) throw ValidationError("duplicate entity id: " + e.id);
    name_index_[key] = entities.size();
    id_index_[e.id] = entities.size();
    entities.push_back(std::move(e));
}

std::string role_name(NodeRole r) {
    switch (r) {
        case NodeRole::Center: return "center";
        case NodeRole::Value: return "value";
        case NodeRole::Topic: return "topic";
    }
    return "value";
}

NodeRole role_from_name(std::string_view s) {
    if (s == "center") return NodeRole::Center;
    if (s == "topic") return NodeRole::Topic;
    if (s == "value") return NodeRole::Value;
    throw ParseError("unknown node role: '" + std::string(s) + "'");
}

void validate_graph(const PropertyGraph& g, std::size_t expected_f) {
    const std::size_t n = g.node_count();
    auto fail = [&](const std::string& why) {
        throw ValidationError("graph '" + g.entity_id + "': " + why);
    };
    if (n == 0) fail("no nodes");
    if (g.adjacency.size() != n * n) fail("adjacency size mismatch");
    if (g.features.size() != n) fail("feature row count != node count");
    std::size_t centers = 0, topics = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (g.roles[i] == NodeRole::Center) ++centers;
        if (g.roles[i] == NodeRole::Topic) ++topics;
        if (g.features[i].size() != expected_f) fail("feature row dimension != f");
        if (g.at(i, i) != 0) fail("nonzero diagonal");
        std::size_t deg = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (g.at(i, j) > 1) fail("non-binary adjacency entry");
            if (g.at(i, j) != g.at(j, i)) fail("asymmetric adjacency");
            deg += g.at(i, j);
        }
        if (g.roles[i] == NodeRole::Value && deg == 0) fail("isolated Value node");
    }
    if (centers != 1) fail("must have exactly one Center node");
    if (topics > 1) fail("more than one Topic node");
    if (g.label != 0 && g.label != 1) fail("label must be binary");
}

std::optional<Entity> parse_entity_json(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (!j.contains("id") || !j["id"].is_string()) return std::nullopt;
    if (!j.contains("name") || !j["name"].is_string()) return std::nullopt;
    Entity e;
    e.id = j["id"].get<std::string>();
    e.name = j["name"].get<std::string>();
    if (e.id.empty() || normalize_name(e.name).empty()) return std::nullopt;
    if (j.contains("summary")) {
        if (!j["summary"].is_string()) return std::nullopt;
        e.summary = j["summary"].get<std::string>();
    }
    if (j.contains("topic")) {
        if (!j["topic"].is_number_integer()) return std::nullopt;
        e.topic = j["topic"].get<int>();
    }
    if (j.contains("triples")) {
        if (!j["triples"].is_array()) return std::nullopt;
        for (const auto& t : j["triples"]) {
            if (!t.is_array() || t.size() != 2 || !t[0].is_string() || !t[1].is_string())
                return std::nullopt;
            Triple tr{e.name, t[0].get<std::string>(), t[1].get<std::string>()};
            if (!tr.valid()) return std::nullopt;
            e.triples.push_back(std::move(tr));
        }
    }
    return e;
}

namespace {

json entity_to_json(const Entity& e) {
    json j;
    j["id"] = e.id;
    j["name"] = e.name;
    j["summary"] = e.summary;
    json triples = json::array();
    for (const auto& t : e.triples) triples.push_back(json::array({t.predicate, t.object}));
    j["triples"] = std::move(triples);
    if (e.topic) j["topic"] = *e.topic;
    return j;
}

}  // namespace

std::string entity_json_string(const Entity& e) { return entity_to_json(e).dump(); }

KnowledgeBase load_kb(const std::string& path) {
    KnowledgeBase kb;
    for_each_line(path, [&](std::size_t, const std::string& line) {
        auto e = parse_entity_json(line);
        if (!e) {
            ++kb.skipped_records;
            return;
        }
        try {
            kb.add(std::move(*e));
        } catch (const ValidationError&) {
            ++kb.skipped_records;
        }
    });
    struct stat st {};
    if (::stat(path.c_str(), &st) == 0) kb.snapshot_time = static_cast<Timestamp>(st.st_mtime);
    return kb;
}

void save_kb(const KnowledgeBase& kb, const std::string& path) {
    auto out = open_output(path);
    for (const auto& e : kb.entities) out << entity_to_json(e).dump() << '\n';
}

namespace {

json graph_to_json(const PropertyGraph& g) {
    json j;
    j["entity_id"] = g.entity_id;
    j["label"] = g.label;
    json roles = json::array();
    for (auto r : g.roles) roles.push_back(role_name(r));
    j["roles"] = std::move(roles);
    const std::size_t n = g.node_count();
    json edges = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            if (!g.at(i, k)) continue;
            auto it = g.edge_labels.find({static_cast<int>(i), static_cast<int>(k)});
            std::string label = it == g.edge_labels.end() ? "" : it->second;
            edges.push_back(json::array({i, k, label}));
        }
    }
    j["edges"] = std::move(edges);
    json feats = json::array();
    for (const auto& row : g.features) {
        json sparse = json::array();
        for (std::size_t c = 0; c < row.size(); ++c)
            if (row[c] != 0.0) sparse.push_back(json::array({c, row[c]}));
        feats.push_back(std::move(sparse));
    }
    j["features"] = std::move(feats);
    return j;
}

PropertyGraph graph_from_json(const json& j, std::size_t f) {
    PropertyGraph g;
    g.entity_id = j.at("entity_id").get<std::string>();
    g.label = j.at("label").get<int>();
    for (const auto& r : j.at("roles")) g.roles.push_back(role_from_name(r.get<std::string>()));
    const std::size_t n = g.roles.size();
    g.adjacency.assign(n * n, 0);
    for (const auto& e : j.at("edges")) {
        std::size_t a = e.at(0).get<std::size_t>(), b = e.at(1).get<std::size_t>();
        if (a >= n || b >= n) throw ParseError("edge endpoint out of range");
        g.set_edge(a, b);
        std::string label = e.at(2).get<std::string>();
        if (!label.empty())
            g.edge_labels[{static_cast<int>(std::min(a, b)), static_cast<int>(std::max(a, b))}] =
                label;
    }
    g.features.assign(n, std::vector<double>(f, 0.0));
    const auto& feats = j.at("features");
    if (feats.size() != n) throw ParseError("feature row count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& cv : feats[i]) {
            std::size_t c = cv.at(0).get<std::size_t>();
            if (c >= f) throw ParseError("feature column out of range");
            g.features[i][c] = cv.at(1).get<double>();
        }
    }
    return g;
}

}  // namespace

void save_graphs(const std::vector<PropertyGraph>& graphs, std::size_t f,
                 const std::string& path) {
    for (const auto& g : graphs) validate_graph(g, f);
    auto out = open_output(path);
    out << json{{"f", f}, {"version", 1}}.dump() << '\n';
    for (const auto& g : graphs) out << graph_to_json(g).dump() << '\n';
}

GraphStore load_graphs(const std::string& path) {
    GraphStore store;
    bool have_header = false;
    for_each_line(path, [&](std::size_t lineno, const std::string& line) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad JSON");
        if (!have_header) {
            if (!j.contains("f") || !j.contains("version") || j["version"].get<int>() != 1)
                throw ParseError(path + ": missing or unsupported graph-store header");
            store.f = j["f"].get<std::size_t>();
            have_header = true;
            return;
        }
        store.graphs.push_back(graph_from_json(j, store.f));
    });
    if (!have_header && !store.graphs.empty())
        throw ParseError(path + ": missing graph-store header");
    for (const auto& g : store.graphs) validate_graph(g, store.f);
    return store;
}

}  // namespace kbfresh
