#pragma once

// Payload builders shared by the command line and the HTTP service. Both
// surfaces render through render_document(), so the same logical query
// yields byte-identical output.

#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interlex/crosswalks.hpp"
#include "interlex/fdo.hpp"
#include "interlex/operations.hpp"
#include "interlex/store.hpp"

namespace interlex {

inline int http_status(Errc c) {
  switch (c) {
    case Errc::UnknownTerm:
    case Errc::UnknownPredicate:
    case Errc::UnknownMapping:
    case Errc::UnknownSchema:
    case Errc::UnknownCrosswalk:
    case Errc::UnknownOperation:
    case Errc::UnknownFdo:
      return 404;
    case Errc::InvalidGupri:
    case Errc::InvalidInstance:
    case Errc::MalformedContent:
    case Errc::EmptyQuery:
    case Errc::ParseFailure:
      return 400;
    default:
      return 422;
  }
}

inline json error_payload(const Error& e) { return json{{"error", e.tag()}, {"message", e.what()}}; }

struct Response {
  int status = 200;
  json body;
};

using QueryParams = std::map<std::string, std::string>;

class Facade {
 public:
  explicit Facade(const Store& store) : s_(store) {}

  Gupri id(std::string_view text) const { return s_.prefixes.canonicalize(text); }

  // ---- terminology service -------------------------------------------------

  json term(const Gupri& id) const { return to_json(s_.terms.term(id), s_.prefixes); }

  json mappings(const std::optional<Gupri>& subject, const std::optional<Gupri>& object) const {
    json out = json::array();
    for (const auto* m : s_.terms.sorted_mappings()) {
      if (subject && m->subject != *subject) continue;
      if (object && m->object != *object) continue;
      out.push_back(to_json(*m, s_.prefixes));
    }
    return out;
  }

  json interop(const Gupri& a, const Gupri& b, double min_confidence = 0.0) const {
    json j = to_json(s_.terms.interop_level(a, b, min_confidence));
    j["a"] = s_.prefixes.compact(a);
    j["b"] = s_.prefixes.compact(b);
    return j;
  }

  json explain(const Gupri& a, const Gupri& b, double min_confidence = 0.0) const {
    json path = json::array();
    for (const auto& m : s_.terms.explain_path(a, b, min_confidence)) path.push_back(to_json(m, s_.prefixes));
    json j = interop(a, b, min_confidence);
    j["path"] = std::move(path);
    return j;
  }

  json closure(double min_confidence = 0.0) const { return s_.terms.closure(min_confidence)->to_json(s_.prefixes); }

  json audit_term(const Gupri& id) const { return to_json(s_.terms.audit_term_fairness(id), s_.prefixes); }

  // ---- schema service ------------------------------------------------------

  json schema(const Gupri& id) const { return to_json(s_.schemas.get(id), s_.prefixes); }

  json validate(const StatementInstance& inst, const ValidationOptions& opts) const {
    return to_json(validate_instance(s_.schemas, s_.terms, inst, opts));
  }

  json crosswalks(const std::optional<Gupri>& source, const std::optional<Gupri>& target) const {
    json out = json::array();
    for (const auto& [cid, cw] : s_.crosswalks.crosswalks()) {
      if (source && cw.source_schema != *source) continue;
      if (target && cw.target_schema != *target) continue;
      out.push_back(to_json(cw, s_.prefixes));
    }
    return out;
  }

  json crosswalk(const Gupri& id) const { return to_json(s_.crosswalks.get(id), s_.prefixes); }

  json check(const Crosswalk& cw) const {
    auto report = check_crosswalk(s_.schemas, s_.terms, cw);
    json j = to_json(report);
    j["registrable"] = report.registrable();
    if (report.registrable()) j["level"] = crosswalk_level_name(classify_report(report));
    return j;
  }

  json classify(const Crosswalk& cw) const {
    return json{{"level", crosswalk_level_name(classify_crosswalk(s_.schemas, s_.terms, cw))}};
  }

  json compose(const Gupri& ab, const Gupri& bc) const {
    auto out = compose_crosswalks(s_.schemas, s_.terms, s_.crosswalks.get(ab), s_.crosswalks.get(bc));
    json j = to_json(out, s_.prefixes);
    j["level"] = crosswalk_level_name(out.level);
    return j;
  }

  json invert(const Gupri& id) const {
    auto out = invert_crosswalk(s_.schemas, s_.terms, s_.crosswalks.get(id));
    json j = to_json(out, s_.prefixes);
    j["level"] = crosswalk_level_name(out.level);
    return j;
  }

  TransformResult transform(const StatementInstance& inst, const Gupri& crosswalk, const TransformOptions& opts) const {
    return transform_instance(s_.schemas, s_.terms, inst, s_.crosswalks.get(crosswalk), opts);
  }

  json transform_payload(const StatementInstance& inst, const Gupri& crosswalk, const TransformOptions& opts) const {
    return to_json(transform(inst, crosswalk, opts).instance, s_.prefixes);
  }

  json plan(const std::vector<Gupri>& schemas, const PlanStrategy& strategy) const {
    return to_json(plan_crosswalks(s_.schemas, s_.crosswalks, schemas, strategy), s_.prefixes);
  }

  // ---- operations service --------------------------------------------------

  json operations(const std::optional<Gupri>& schema, bool include_reachable = true) const {
    if (schema) {
      return to_json(applicable_operations(s_.schemas, s_.crosswalks, s_.operations, *schema, include_reachable),
                     s_.prefixes);
    }
    json out = json::array();
    for (const auto& [oid, op] : s_.operations.operations()) out.push_back(to_json(op, s_.prefixes));
    return out;
  }

  json x_interop(const Gupri& a, const Gupri& b, const Gupri& op) const {
    return to_json(x_interoperable(s_.schemas, s_.crosswalks, s_.operations, a, b, op), s_.prefixes);
  }

  json convert(const StatementInstance& inst, const std::string& value_slot, const std::string& unit_slot,
               const Gupri& target) const {
    return to_json(convert_unit(s_.schemas, s_.terms, inst, value_slot, unit_slot, target), s_.prefixes);
  }

  json actionability(std::string_view raw) const {
    auto a = actionability_class(s_.prefixes, s_.terms, s_.schemas, s_.crosswalks, s_.operations, raw);
    return json{{"class", actionability_name(a)}};
  }

  // ---- FDO records ---------------------------------------------------------

  json fdo(const Gupri& id) const { return to_json(s_.fdos.get(id), s_.prefixes); }

  json assessment(const Gupri& id) const {
    return to_json(assess_fdo(s_.terms, s_.schemas, s_.crosswalks, s_.fdos, id), s_.prefixes);
  }

  json assess_record_payload(const json& record) const {
    FdoRecord r = fdo_from_json(record, s_.prefixes);
    FdoRegistry::check_content(r);
    return to_json(assess_record(s_.terms, s_.schemas, s_.crosswalks, r), s_.prefixes);
  }

  json find_payload(const FindQuery& q) const {
    json out = json::array();
    for (const auto& g : find(s_, q)) out.push_back(s_.prefixes.compact(g));
    return json{{"fdos", out}};
  }

  FindQuery find_query(const QueryParams& q) const {
    FindQuery fq;
    if (auto it = q.find("term"); it != q.end() && !it->second.empty()) fq.term = id(it->second);
    if (auto it = q.find("expand"); it != q.end() && !it->second.empty()) {
      auto e = parse_expand(it->second);
      if (!e) throw Error(Errc::ParseFailure, "expand must be none, ontological or referential");
      fq.expand = *e;
    }
    if (auto it = q.find("statement_type"); it != q.end() && !it->second.empty()) fq.statement_type = id(it->second);
    if (auto it = q.find("category"); it != q.end() && !it->second.empty()) {
      auto c = parse_category(it->second);
      if (!c) throw Error(Errc::ParseFailure, "unknown statement category '" + it->second + "'");
      fq.category = *c;
    }
    return fq;
  }

  // ---- routing -------------------------------------------------------------

  // Dispatches one request of the endpoint table. Never throws.
  Response route(std::string_view method, std::string_view path, const QueryParams& query,
                 std::string_view body = {}) const {
    try {
      return Response{200, dispatch(method, path, query, body)};
    } catch (const Error& e) {
      return Response{http_status(e.code()), error_payload(e)};
    } catch (const json::exception& e) {
      return Response{400, json{{"error", errc_tag(Errc::ParseFailure)}, {"message", e.what()}}};
    }
  }

 private:
  static std::optional<std::string> param(const QueryParams& q, const char* key) {
    auto it = q.find(key);
    if (it == q.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  std::optional<Gupri> opt_id(const QueryParams& q, const char* key) const {
    auto v = param(q, key);
    return v ? std::optional<Gupri>(id(*v)) : std::nullopt;
  }

  Gupri req_id(const QueryParams& q, const char* key) const {
    auto v = param(q, key);
    if (!v) throw Error(Errc::ParseFailure, std::string("missing query parameter '") + key + "'");
    return id(*v);
  }

  static double confidence(const QueryParams& q) {
    auto v = param(q, "min_confidence");
    if (!v) return 0.0;
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), d);
    if (ec != std::errc() || ptr != v->data() + v->size() || d < 0.0 || d > 1.0) {
      throw Error(Errc::ParseFailure, "min_confidence must be a number in [0, 1]");
    }
    return d;
  }

  static bool strip(std::string_view& path, std::string_view prefix) {
    if (path.substr(0, prefix.size()) != prefix || path.size() == prefix.size()) return false;
    path.remove_prefix(prefix.size());
    return true;
  }

  json dispatch(std::string_view method, std::string_view path, const QueryParams& q, std::string_view body) const {
    if (method == "GET") {
      std::string_view rest = path;
      if (strip(rest, "/terms/")) return term(id(rest));
      if (path == "/mappings") return mappings(opt_id(q, "subject"), opt_id(q, "object"));
      if (path == "/interop") return interop(req_id(q, "a"), req_id(q, "b"), confidence(q));
      if (path == "/explain") return explain(req_id(q, "a"), req_id(q, "b"), confidence(q));
      if (path == "/closure") return closure(confidence(q));
      if (strip(rest, "/schemas/")) return schema(id(rest));
      if (path == "/crosswalks") return crosswalks(opt_id(q, "source"), opt_id(q, "target"));
      if (strip(rest, "/crosswalks/")) return crosswalk(id(rest));
      if (path == "/operations") return operations(opt_id(q, "schema"), param(q, "direct") != "true");
      if (strip(rest, "/fdos/")) {
        constexpr std::string_view suffix = "/assessment";
        if (rest.size() > suffix.size() && rest.substr(rest.size() - suffix.size()) == suffix) {
          return assessment(id(rest.substr(0, rest.size() - suffix.size())));
        }
        return fdo(id(rest));
      }
      if (path == "/find") return find_payload(find_query(q));
    } else if (method == "POST") {
      if (path == "/transform") {
        json j = jsonu::parse(body, Errc::ParseFailure, "transform request");
        TransformOptions opts;
        if (j.contains("strict")) opts.allow_referential = !j.at("strict").get<bool>();
        if (j.contains("min_confidence")) opts.min_confidence = j.at("min_confidence").get<double>();
        return transform_payload(instance_from_json(jsonu::require(j, "instance", Errc::ParseFailure, "transform request"),
                                                    s_.prefixes),
                                 id(jsonu::req_string(j, "crosswalk", Errc::ParseFailure, "transform request")), opts);
      }
      if (path == "/assess") return assess_record_payload(jsonu::parse(body, Errc::ParseFailure, "assess request"));
    }
    throw Error(Errc::ParseFailure, "no endpoint " + std::string(method) + " " + std::string(path));
  }

  const Store& s_;
};

}  // namespace interlex
