#pragma once
// Encyclopedia access: entity attributes, summaries, and revision timestamps
// from a local dump file or a MediaWiki-shaped HTTP API, plus the binary
// modification label.
//
// Dump format: kb.jsonl lines with an optional "revisions" array of ISO-8601
// strings. HTTP endpoints: GET /entity/<name> (entity JSON or 404) and
// GET /entity/<name>/revisions?start=&end= returning
//   {"query": {"pages": [{"title": ..., "revisions": [{"timestamp": ...}]}]}}

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kbfresh/kb_model.hpp"
#include "kbfresh/timeutil.hpp"

namespace kbfresh {

struct RevisionRecord {
    std::string entity_id;              // name used for the query
    std::vector<Timestamp> timestamps;  // strictly increasing
};

class Source {
  public:
    virtual ~Source() = default;
    // nullopt = entity absent (not an error). Transport or parse failure
    // throws SourceError carrying the attempt count.
    virtual std::optional<Entity> fetch_entity(const std::string& name) = 0;
    // Timestamps as reported by the source for the window query; the caller
    // filters and normalizes.
    virtual std::vector<Timestamp> fetch_revisions(const std::string& name,
                                                   const LabelWindow& window) = 0;
};

class DumpSource final : public Source {
  public:
    explicit DumpSource(const std::string& path);

    std::optional<Entity> fetch_entity(const std::string& name) override;
    std::vector<Timestamp> fetch_revisions(const std::string& name,
                                           const LabelWindow& window) override;

  private:
    std::map<std::string, Entity> entities_;                   // by normalized name
    std::map<std::string, std::vector<Timestamp>> revisions_;  // by normalized name
};

struct HttpOptions {
    int attempts = 3;
    int backoff_ms = 100;  // doubled after each failed attempt
};

class HttpSource final : public Source {
  public:
    explicit HttpSource(std::string base_url, HttpOptions options = {});
    ~HttpSource() override;

    std::optional<Entity> fetch_entity(const std::string& name) override;
    std::vector<Timestamp> fetch_revisions(const std::string& name,
                                           const LabelWindow& window) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Source> open_source(const std::string& locator);  // http(s):// or file path

// Window-filtered, ascending, deduplicated revision record.
RevisionRecord fetch_revisions(Source& source, const std::string& name,
                               const LabelWindow& window);

// 1 iff some revision falls in (window.start, window.end].
int label_entity(const RevisionRecord& rev, const LabelWindow& window);

}  // namespace kbfresh
