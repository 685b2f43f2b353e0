#pragma once

// FAIR Digital Object records and the extended FAIR checklist assessor.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "interlex/crosswalks.hpp"
#include "interlex/error.hpp"
#include "interlex/gupri.hpp"
#include "interlex/json_util.hpp"
#include "interlex/schemas.hpp"
#include "interlex/terminology.hpp"

namespace interlex {

enum class StatementCategory { Lexical, Assertional, Contingent, Prototypical, Universal };

inline constexpr std::string_view kCategoryNames[] = {"lexical", "assertional", "contingent", "prototypical",
                                                      "universal"};

inline std::string_view category_name(StatementCategory c) { return kCategoryNames[static_cast<int>(c)]; }

inline std::optional<StatementCategory> parse_category(std::string_view s) {
  for (int i = 0; i < 5; ++i)
    if (kCategoryNames[i] == s) return static_cast<StatementCategory>(i);
  return std::nullopt;
}

// Ordinal certainty scale, most certain first.
enum class Certainty { AssertedCertain, Probable, Possible, Disputed, Unknown };

inline constexpr std::string_view kCertaintyNames[] = {"asserted-certain", "probable", "possible", "disputed",
                                                       "unknown"};

inline std::string_view certainty_name(Certainty c) { return kCertaintyNames[static_cast<int>(c)]; }

inline std::optional<Certainty> parse_certainty(std::string_view s) {
  for (int i = 0; i < 5; ++i)
    if (kCertaintyNames[i] == s) return static_cast<Certainty>(i);
  return std::nullopt;
}

struct TermRef {
  Gupri term;
  friend bool operator==(const TermRef&, const TermRef&) = default;
};

using FdoContent = std::variant<TermRef, StatementInstance, std::vector<StatementInstance>>;

struct FdoRecord {
  Gupri gupri;
  FdoContent content;
  std::vector<Gupri> schema_refs;  // one for an instance, one per entry for a collection
  std::string creator;
  std::vector<std::string> authors;
  std::optional<StatementCategory> category;
  std::optional<std::string> logical_framework;
  std::optional<std::string> human_readable;
  std::optional<Certainty> certainty;
  std::optional<std::string> license;
  std::map<std::string, std::string> provenance;
  std::optional<Gupri> data_identifier;

  friend bool operator==(const FdoRecord&, const FdoRecord&) = default;

  std::vector<const StatementInstance*> instances() const {
    std::vector<const StatementInstance*> out;
    if (const auto* i = std::get_if<StatementInstance>(&content)) out.push_back(i);
    if (const auto* c = std::get_if<std::vector<StatementInstance>>(&content))
      for (const auto& i : *c) out.push_back(&i);
    return out;
  }

  // Class-bearing terms of the content.
  std::set<Gupri> content_terms() const {
    if (const auto* t = std::get_if<TermRef>(&content)) return {t->term};
    std::set<Gupri> out;
    for (const auto* i : instances()) out.merge(classifier_terms(*i));
    return out;
  }

  // Every identifier the content mentions, including individuals.
  std::set<Gupri> mentioned() const {
    if (const auto* t = std::get_if<TermRef>(&content)) return {t->term};
    std::set<Gupri> out;
    for (const auto* i : instances()) out.merge(mentioned_terms(*i));
    return out;
  }
};

class FdoRegistry {
 public:
  Gupri register_fdo(FdoRecord r) {
    if (r.gupri.empty()) throw Error(Errc::InvalidGupri, "record without gupri");
    check_content(r);
    auto it = records_.find(r.gupri);
    if (it != records_.end()) {
      if (it->second == r) return r.gupri;
      throw Error(Errc::ConflictingFdo, "different record already registered as " + r.gupri.str());
    }
    Gupri id = r.gupri;
    records_.emplace(id, std::move(r));
    return id;
  }

  static void check_content(const FdoRecord& r) {
    if (const auto* c = std::get_if<std::vector<StatementInstance>>(&r.content); c && c->empty()) {
      throw Error(Errc::MalformedContent, "empty collection");
    }
    for (const auto* inst : r.instances()) {
      if (inst->schema_id.empty()) throw Error(Errc::MalformedContent, "instance without schema");
      for (const auto& [slot, fill] : inst->fills) {
        if (const auto* lit = std::get_if<LiteralFill>(&fill); lit && !literal_parses(lit->value, lit->datatype)) {
          throw Error(Errc::MalformedContent, "slot '" + slot + "': '" + lit->value + "' is not a valid " +
                                                  std::string(datatype_name(lit->datatype)));
        }
      }
    }
  }

  const FdoRecord* find(const Gupri& id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
  }

  const FdoRecord& get(const Gupri& id) const {
    if (const auto* r = find(id)) return *r;
    throw Error(Errc::UnknownFdo, id.str());
  }

  const std::map<Gupri, FdoRecord>& records() const noexcept { return records_; }

 private:
  std::map<Gupri, FdoRecord> records_;
};

struct CheckResult {
  std::string check_id;
  CheckStatus status = CheckStatus::NotApplicable;
  std::string detail;

  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct AssessmentReport {
  Gupri fdo;
  std::vector<CheckResult> checks;
  std::size_t passed = 0;
  std::size_t applicable = 0;
  double score = 0.0;

  const CheckResult* find(std::string_view id) const {
    for (const auto& c : checks)
      if (c.check_id == id) return &c;
    return nullptr;
  }
  CheckStatus status(std::string_view id) const {
    const auto* c = find(id);
    return c ? c->status : CheckStatus::NotApplicable;
  }
};

// Checklist order. Anything not listed in the evaluated set is a
// protocol/registry-level principle and reported not_applicable.
inline const std::vector<std::string>& checklist_ids() {
  static const std::vector<std::string> ids{"F1",   "F2", "F3", "F4",   "F5.1", "F5.2", "F6.1", "F6.2",
                                            "F7",   "A1", "A1.1", "A1.2", "A1.3", "A2", "I1",   "I2",
                                            "I3",   "I4", "I5",   "R1.1", "R1.2", "R1.3", "R1.4"};
  return ids;
}

inline AssessmentReport assess_record(const Terminology& terms, const SchemaRegistry& schemas,
                                      const CrosswalkRegistry& crosswalks, const FdoRecord& r) {
  std::map<std::string, CheckResult> results;
  auto set = [&](const std::string& id, bool ok, std::string detail = {}) {
    results[id] = {id, ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)};
  };
  auto na = [&](const std::string& id, std::string detail) {
    results[id] = {id, CheckStatus::NotApplicable, std::move(detail)};
  };
  const bool lexical_content = std::holds_alternative<TermRef>(r.content);
  const auto content_terms = r.content_terms();

  set("F1", !r.gupri.empty() && Gupri::looks_absolute(r.gupri.str()));
  set("F3", r.data_identifier.has_value(), r.data_identifier ? "" : "no data identifier");

  std::vector<std::string> unresolved, weak_labels, undefined;
  for (const auto& t : content_terms) {
    const TermRecord* rec = terms.find_term(t);
    if (!rec) {
      unresolved.push_back(t.str());
      continue;
    }
    auto audit = terms.audit_term_fairness(t);
    if (!audit.passes("has_multilingual_labels") || !audit.passes("has_synonyms")) weak_labels.push_back(t.str());
    if (!audit.passes("has_definition")) undefined.push_back(t.str());
  }
  auto joined = [](const std::string& prefix, const std::vector<std::string>& xs) {
    std::string s;
    for (const auto& x : xs) s += (s.empty() ? prefix : ", ") + x;
    return s;
  };
  set("F5.1", unresolved.empty(), joined("unresolved terms: ", unresolved));
  set("F5.2", unresolved.empty() && weak_labels.empty(),
      joined("missing multilingual labels or synonyms: ", unresolved.empty() ? weak_labels : unresolved));
  set("I4", unresolved.empty() && undefined.empty(),
      joined("missing definitions: ", unresolved.empty() ? undefined : unresolved));

  if (lexical_content) {
    na("F6.1", "lexical content carries no statement schema");
    na("F6.2", "lexical content carries no statement schema");
  } else {
    std::set<Gupri> content_schemas, refs(r.schema_refs.begin(), r.schema_refs.end());
    std::string problem;
    for (const auto* inst : r.instances()) {
      content_schemas.insert(inst->schema_id);
      if (!schemas.find(inst->schema_id)) {
        problem = "unregistered schema " + inst->schema_id.str();
      } else if (!validate_instance(schemas, terms, *inst).valid) {
        problem = "content does not validate against " + inst->schema_id.str();
      }
    }
    if (r.schema_refs.empty()) {
      problem = "no schema reference";
    } else if (refs != content_schemas) {
      problem = "schema reference does not match the content's schema";
    }
    set("F6.1", problem.empty(), problem);

    auto links = crosswalks.links();
    auto groups = detect_schema_duplicates(schemas, terms, links);
    bool any_group = false, all_covered = true;
    for (const auto& s : content_schemas) {
      if (!schemas.find(s)) {
        all_covered = false;
        any_group = true;
        continue;
      }
      for (const auto& g : groups) {
        if (std::find(g.schema_ids.begin(), g.schema_ids.end(), s) == g.schema_ids.end()) continue;
        any_group = true;
        all_covered = all_covered && g.crosswalk_covered;
      }
    }
    if (!any_group) {
      na("F6.2", "only one schema exists for the statement type");
    } else {
      set("F6.2", all_covered, all_covered ? "" : "schemas for the statement type are not crosswalked");
    }
  }

  set("F7", r.category.has_value(), r.category ? "" : "no statement category");
  set("I5", r.logical_framework.has_value() && !r.logical_framework->empty(),
      r.logical_framework ? "" : "no logical framework");
  set("R1.1", r.license.has_value() && !r.license->empty(), r.license ? "" : "no license");
  bool authors_ok = !r.authors.empty() && std::none_of(r.authors.begin(), r.authors.end(),
                                                       [](const std::string& a) { return a.empty(); });
  set("R1.2", !r.creator.empty() && authors_ok,
      r.creator.empty() ? "no creator" : (authors_ok ? "" : "no content authors"));
  set("R1.4", r.certainty.has_value(), r.certainty ? "" : "no certainty level");

  AssessmentReport report;
  report.fdo = r.gupri;
  for (const auto& id : checklist_ids()) {
    auto it = results.find(id);
    CheckResult c = it != results.end() ? it->second
                                        : CheckResult{id, CheckStatus::NotApplicable, "protocol/registry-level — out of scope"};
    if (c.status != CheckStatus::NotApplicable) ++report.applicable;
    if (c.status == CheckStatus::Pass) ++report.passed;
    report.checks.push_back(std::move(c));
  }
  report.score = report.applicable == 0 ? 0.0 : static_cast<double>(report.passed) / static_cast<double>(report.applicable);
  return report;
}

inline AssessmentReport assess_fdo(const Terminology& terms, const SchemaRegistry& schemas,
                                   const CrosswalkRegistry& crosswalks, const FdoRegistry& fdos, const Gupri& id) {
  return assess_record(terms, schemas, crosswalks, fdos.get(id));
}

struct CheckTally {
  std::string check_id;
  std::size_t pass = 0, fail = 0, not_applicable = 0;
};

struct CollectionAssessment {
  std::size_t records = 0;
  double mean_score = 0.0;
  std::vector<CheckTally> per_check;  // checklist order; empty for no records
};

inline CollectionAssessment assess_collection(const Terminology& terms, const SchemaRegistry& schemas,
                                              const CrosswalkRegistry& crosswalks, const FdoRegistry& fdos,
                                              const std::vector<Gupri>& ids) {
  CollectionAssessment agg;
  if (ids.empty()) return agg;
  for (const auto& id : checklist_ids()) agg.per_check.push_back({id});
  double total = 0.0;
  for (const auto& id : ids) {
    auto report = assess_fdo(terms, schemas, crosswalks, fdos, id);
    total += report.score;
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
      switch (report.checks[i].status) {
        case CheckStatus::Pass: ++agg.per_check[i].pass; break;
        case CheckStatus::Fail: ++agg.per_check[i].fail; break;
        case CheckStatus::NotApplicable: ++agg.per_check[i].not_applicable; break;
      }
    }
  }
  agg.records = ids.size();
  agg.mean_score = total / static_cast<double>(ids.size());
  return agg;
}

// ---- document forms --------------------------------------------------------

inline json to_json(const FdoRecord& r, const PrefixMap& pm) {
  json content;
  if (const auto* t = std::get_if<TermRef>(&r.content)) {
    content = json{{"term_ref", pm.compact(t->term)}};
  } else if (const auto* i = std::get_if<StatementInstance>(&r.content)) {
    content = json{{"instance", to_json(*i, pm)}};
  } else {
    json arr = json::array();
    for (const auto& i : std::get<std::vector<StatementInstance>>(r.content)) arr.push_back(to_json(i, pm));
    content = json{{"collection", arr}};
  }
  json j{{"gupri", pm.compact(r.gupri)},
         {"content", content},
         {"creator", r.creator},
         {"authors", r.authors},
         {"provenance", r.provenance}};
  if (std::holds_alternative<std::vector<StatementInstance>>(r.content)) {
    json refs = json::array();
    for (const auto& s : r.schema_refs) refs.push_back(pm.compact(s));
    if (!r.schema_refs.empty()) j["schema_ref"] = refs;
  } else if (!r.schema_refs.empty()) {
    j["schema_ref"] = pm.compact(r.schema_refs.front());
  }
  if (r.category) j["category"] = category_name(*r.category);
  if (r.logical_framework) j["logical_framework"] = *r.logical_framework;
  if (r.human_readable) j["human_readable"] = *r.human_readable;
  if (r.certainty) j["certainty"] = certainty_name(*r.certainty);
  if (r.license) j["license"] = *r.license;
  if (r.data_identifier) j["data_identifier"] = pm.compact(*r.data_identifier);
  return j;
}

inline FdoRecord fdo_from_json(const json& j, const PrefixMap& pm) {
  const std::string ctx = "FDO document";
  constexpr Errc bad = Errc::MalformedContent;
  if (!j.is_object()) throw Error(bad, ctx + ": expected an object");
  FdoRecord r;
  r.gupri = pm.canonicalize(jsonu::req_string(j, "gupri", bad, ctx));
  const json& content = jsonu::require(j, "content", bad, ctx);
  if (!content.is_object() || content.size() != 1) throw Error(bad, ctx + ": content needs exactly one of term_ref, instance, collection");
  try {
    if (content.contains("term_ref")) {
      r.content = TermRef{pm.canonicalize(jsonu::req_string(content, "term_ref", bad, ctx))};
    } else if (content.contains("instance")) {
      r.content = instance_from_json(content["instance"], pm);
    } else if (content.contains("collection")) {
      if (!content["collection"].is_array()) throw Error(bad, ctx + ": collection must be an array");
      std::vector<StatementInstance> items;
      for (const auto& i : content["collection"]) items.push_back(instance_from_json(i, pm));
      r.content = std::move(items);
    } else {
      throw Error(bad, ctx + ": unknown content kind");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidInstance) throw Error(bad, e.what());
    throw;
  }
  if (j.contains("schema_ref") && !j["schema_ref"].is_null()) {
    const json& s = j["schema_ref"];
    if (s.is_string()) {
      r.schema_refs.push_back(pm.canonicalize(s.get<std::string>()));
    } else if (s.is_array()) {
      for (const auto& x : s) {
        if (!x.is_string()) throw Error(bad, ctx + ": schema_ref entries must be strings");
        r.schema_refs.push_back(pm.canonicalize(x.get<std::string>()));
      }
    } else {
      throw Error(bad, ctx + ": schema_ref must be a string or list");
    }
  }
  r.creator = jsonu::opt_string(j, "creator", bad, ctx).value_or("");
  if (j.contains("authors")) {
    if (!j["authors"].is_array()) throw Error(bad, ctx + ": authors must be an array");
    for (const auto& a : j["authors"]) {
      if (!a.is_string()) throw Error(bad, ctx + ": authors must be strings");
      r.authors.push_back(a.get<std::string>());
    }
  }
  if (auto c = jsonu::opt_string(j, "category", bad, ctx)) {
    r.category = parse_category(*c);
    if (!r.category) throw Error(bad, ctx + ": category '" + *c + "' is not one of lexical, assertional, contingent, prototypical, universal");
  }
  r.logical_framework = jsonu::opt_string(j, "logical_framework", bad, ctx);
  r.human_readable = jsonu::opt_string(j, "human_readable", bad, ctx);
  if (auto c = jsonu::opt_string(j, "certainty", bad, ctx)) {
    r.certainty = parse_certainty(*c);
    if (!r.certainty) throw Error(bad, ctx + ": certainty '" + *c + "' is not on the scale");
  }
  r.license = jsonu::opt_string(j, "license", bad, ctx);
  if (j.contains("provenance")) {
    if (!j["provenance"].is_object()) throw Error(bad, ctx + ": provenance must be an object");
    for (const auto& [k, v] : j["provenance"].items()) {
      if (!v.is_string()) throw Error(bad, ctx + ": provenance values must be strings");
      r.provenance[k] = v.get<std::string>();
    }
  }
  if (auto d = jsonu::opt_string(j, "data_identifier", bad, ctx)) r.data_identifier = pm.canonicalize(*d);
  return r;
}

inline json to_json(const AssessmentReport& r, const PrefixMap& pm) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json cj{{"check", c.check_id}, {"status", check_status_name(c.status)}};
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  return json{{"fdo", pm.compact(r.fdo)},
              {"checks", checks},
              {"passed", r.passed},
              {"applicable", r.applicable},
              {"score", r.score}};
}

inline json to_json(const CollectionAssessment& a) {
  json rows = json::array();
  for (const auto& t : a.per_check) {
    rows.push_back(json{{"check", t.check_id}, {"pass", t.pass}, {"fail", t.fail}, {"not_applicable", t.not_applicable}});
  }
  return json{{"records", a.records}, {"mean_score", a.mean_score}, {"per_check", rows}};
}

}  // namespace interlex
