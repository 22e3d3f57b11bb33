#include "kbfresh/encyc.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "kbfresh/error.hpp"
#include "kbfresh/jsonl.hpp"
#include "kbfresh/text.hpp"

namespace kbfresh {

using nlohmann::json;

DumpSource::DumpSource(const std::string& path) {
    for_each_line(path, [&](std::size_t lineno, const std::string& line) {
        auto entity = parse_entity_json(line);
        if (!entity) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed entity record");
        }
        const std::string key = normalize_name(entity->name);
        json j = json::parse(line);
        if (j.contains("revisions")) {
            if (!j["revisions"].is_array()) {
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": \"revisions\" must be an array");
            }
            auto& revs = revisions_[key];
            for (const auto& r : j["revisions"]) {
                if (!r.is_string()) {
                    throw ParseError(path + ":" + std::to_string(lineno) +
                                     ": revision timestamps must be strings");
                }
                revs.push_back(parse_iso8601(r.get<std::string>()));
            }
        }
        entities_[key] = std::move(*entity);
    });
}

std::optional<Entity> DumpSource::fetch_entity(const std::string& name) {
    auto it = entities_.find(normalize_name(name));
    if (it == entities_.end()) return std::nullopt;
    return it->second;
}

std::vector<Timestamp> DumpSource::fetch_revisions(const std::string& name, const LabelWindow&) {
    auto it = revisions_.find(normalize_name(name));
    if (it == revisions_.end()) return {};
    return it->second;
}

namespace {

std::string percent_encode(const std::string& s) {
    static const char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
            c == '-' || c == '.' || c == '_' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

}  // namespace

struct HttpSource::Impl {
    httplib::Client client;
    HttpOptions options;

    Impl(const std::string& base_url, HttpOptions opts) : client(base_url), options(opts) {
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(5, 0);
    }

    // Runs the request up to options.attempts times. `parse` must throw
    // ParseError on a malformed body; that counts as a failed attempt.
    // Returns nullopt on 404 without retrying.
    template <typename T>
    std::optional<T> get(const std::string& path, const std::function<T(const std::string&)>& parse) {
        std::string last_error = "no attempts made";
        int delay_ms = options.backoff_ms;
        for (int attempt = 1; attempt <= options.attempts; ++attempt) {
            if (attempt > 1) {
                std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
                delay_ms *= 2;
            }
            auto res = client.Get(path.c_str());
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 404) return std::nullopt;
            if (res->status != 200) {
                last_error = "HTTP status " + std::to_string(res->status);
                continue;
            }
            try {
                return parse(res->body);
            } catch (const Error& e) {
                last_error = e.what();
                continue;
            }
        }
        throw SourceError("GET " + path + " failed after " + std::to_string(options.attempts) +
                              " attempts: " + last_error,
                          options.attempts);
    }
};

HttpSource::HttpSource(std::string base_url, HttpOptions options)
    : impl_(std::make_unique<Impl>(base_url, options)) {}

HttpSource::~HttpSource() = default;

std::optional<Entity> HttpSource::fetch_entity(const std::string& name) {
    const std::string path = "/entity/" + percent_encode(name);
    return impl_->get<Entity>(path, [&](const std::string& body) {
        auto entity = parse_entity_json(body);
        if (!entity) throw ParseError("malformed entity body for " + name);
        return *entity;
    });
}

std::vector<Timestamp> HttpSource::fetch_revisions(const std::string& name,
                                                   const LabelWindow& window) {
    const std::string path = "/entity/" + percent_encode(name) +
                             "/revisions?start=" + percent_encode(format_iso8601(window.start)) +
                             "&end=" + percent_encode(format_iso8601(window.end));
    auto result = impl_->get<std::vector<Timestamp>>(path, [&](const std::string& body) {
        json j = json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("query") ||
            !j["query"].is_object() || !j["query"].contains("pages") ||
            !j["query"]["pages"].is_array()) {
            throw ParseError("malformed revisions body for " + name);
        }
        std::vector<Timestamp> out;
        for (const auto& page : j["query"]["pages"]) {
            if (!page.is_object()) throw ParseError("malformed page object for " + name);
            if (page.contains("missing")) continue;
            if (!page.contains("revisions")) continue;
            if (!page["revisions"].is_array()) throw ParseError("malformed revisions array");
            for (const auto& rev : page["revisions"]) {
                if (!rev.is_object() || !rev.contains("timestamp") ||
                    !rev["timestamp"].is_string()) {
                    throw ParseError("malformed revision entry for " + name);
                }
                out.push_back(parse_iso8601(rev["timestamp"].get<std::string>()));
            }
        }
        return out;
    });
    return result ? *result : std::vector<Timestamp>{};
}

std::unique_ptr<Source> open_source(const std::string& locator) {
    if (locator.rfind("http://", 0) == 0 || locator.rfind("https://", 0) == 0) {
        return std::make_unique<HttpSource>(locator);
    }
    return std::make_unique<DumpSource>(locator);
}

RevisionRecord fetch_revisions(Source& source, const std::string& name,
                               const LabelWindow& window) {
    RevisionRecord rec;
    rec.entity_id = name;
    for (Timestamp t : source.fetch_revisions(name, window)) {
        if (window.contains(t)) rec.timestamps.push_back(t);
    }
    std::sort(rec.timestamps.begin(), rec.timestamps.end());
    rec.timestamps.erase(std::unique(rec.timestamps.begin(), rec.timestamps.end()),
                         rec.timestamps.end());
    return rec;
}

int label_entity(const RevisionRecord& rev, const LabelWindow& window) {
    for (Timestamp t : rev.timestamps) {
        if (window.contains(t)) return 1;
    }
    return 0;
}

}  // namespace kbfresh
