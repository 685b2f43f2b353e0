#pragma once

// Statement schemas (type models) and validation of statement instances
// (token models) against them.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "interlex/error.hpp"
#include "interlex/gupri.hpp"
#include "interlex/json_util.hpp"
#include "interlex/literal.hpp"
#include "interlex/terminology.hpp"

namespace interlex {

enum class SlotKind { Resource, Literal };

inline std::string_view slot_kind_name(SlotKind k) { return k == SlotKind::Resource ? "resource" : "literal"; }

// A resource slot is constrained by an ontology class, a literal slot by a
// datatype tag.
using SlotConstraint = std::variant<Gupri, Datatype>;

struct SlotSpec {
  std::string slot_id;
  std::string role;
  SlotKind kind = SlotKind::Resource;
  SlotConstraint constraint;
  bool required = true;

  friend bool operator==(const SlotSpec&, const SlotSpec&) = default;

  const Gupri& class_constraint() const { return std::get<Gupri>(constraint); }
  Datatype datatype() const { return std::get<Datatype>(constraint); }
};

struct StatementSchema {
  Gupri id;
  Gupri statement_type;
  std::string label;
  std::vector<SlotSpec> slots;
  std::optional<std::string> logical_framework;
  std::vector<std::string> example_queries;  // opaque SPARQL/Cypher/SQL text

  friend bool operator==(const StatementSchema&, const StatementSchema&) = default;

  const SlotSpec* slot(std::string_view id) const {
    for (const auto& s : slots)
      if (s.slot_id == id) return &s;
    return nullptr;
  }
};

struct ResourceFill {
  Gupri value;
  std::optional<Gupri> asserted_class;

  // The term checked against a class constraint.
  const Gupri& classifier() const { return asserted_class ? *asserted_class : value; }

  friend bool operator==(const ResourceFill&, const ResourceFill&) = default;
};

struct LiteralFill {
  std::string value;
  Datatype datatype = Datatype::String;

  friend bool operator==(const LiteralFill&, const LiteralFill&) = default;
};

using SlotFill = std::variant<ResourceFill, LiteralFill>;

inline SlotKind fill_kind(const SlotFill& f) {
  return std::holds_alternative<ResourceFill>(f) ? SlotKind::Resource : SlotKind::Literal;
}

struct StatementInstance {
  Gupri schema_id;
  std::map<std::string, SlotFill> fills;
  std::optional<std::string> provenance;

  friend bool operator==(const StatementInstance&, const StatementInstance&) = default;
};

// Every resource term an instance mentions: fill values and asserted classes.
inline std::set<Gupri> mentioned_terms(const StatementInstance& inst) {
  std::set<Gupri> out;
  for (const auto& [slot, fill] : inst.fills) {
    if (const auto* r = std::get_if<ResourceFill>(&fill)) {
      out.insert(r->value);
      if (r->asserted_class) out.insert(*r->asserted_class);
    }
  }
  return out;
}

// The terms that carry class meaning: the classifier of each resource fill.
inline std::set<Gupri> classifier_terms(const StatementInstance& inst) {
  std::set<Gupri> out;
  for (const auto& [slot, fill] : inst.fills)
    if (const auto* r = std::get_if<ResourceFill>(&fill)) out.insert(r->classifier());
  return out;
}

enum class ViolationKind {
  MissingRequiredSlot,
  UnknownSlot,
  KindMismatch,
  DatatypeMismatch,
  LiteralParseFailure,
  ConstraintFailure,
};

inline std::string_view violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::MissingRequiredSlot: return "MissingRequiredSlot";
    case ViolationKind::UnknownSlot: return "UnknownSlot";
    case ViolationKind::KindMismatch: return "KindMismatch";
    case ViolationKind::DatatypeMismatch: return "DatatypeMismatch";
    case ViolationKind::LiteralParseFailure: return "LiteralParseFailure";
    case ViolationKind::ConstraintFailure: return "ConstraintFailure";
  }
  return "ConstraintFailure";
}

struct Violation {
  ViolationKind kind;
  std::string slot;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;

  bool has(ViolationKind k, std::string_view slot) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.kind == k && v.slot == slot; });
  }
};

struct ValidationOptions {
  // Accept only ontological equivalence for class constraints.
  bool strict = false;
  double min_confidence = 0.0;
};

// A term satisfies class constraint C when it equals C, is equivalent to C
// at the accepted level, or reaches C through the subclass hierarchy.
inline bool satisfies_constraint(const ClosureSnapshot& closure, const Gupri& term, const Gupri& constraint,
                                 bool strict) {
  if (term == constraint) return true;
  if (closure.same_class(term, constraint, strict ? ClassLevel::Ontological : ClassLevel::Referential)) return true;
  return closure.hierarchy_reaches(term, constraint);
}

class SchemaRegistry {
 public:
  Gupri register_schema(StatementSchema s) {
    check_schema(s);
    auto it = schemas_.find(s.id);
    if (it != schemas_.end()) {
      if (it->second == s) return s.id;
      throw Error(Errc::ConflictingSchema, "different schema already registered as " + s.id.str());
    }
    Gupri id = s.id;
    schemas_.emplace(id, std::move(s));
    return id;
  }

  static void check_schema(const StatementSchema& s) {
    if (s.id.empty() || s.statement_type.empty()) throw Error(Errc::InvalidGupri, "schema id and statement_type required");
    std::set<std::string> ids;
    bool any_required = false;
    for (const auto& slot : s.slots) {
      if (slot.slot_id.empty()) throw Error(Errc::InvalidSchema, "empty slot_id");
      if (!ids.insert(slot.slot_id).second) throw Error(Errc::DuplicateSlotId, slot.slot_id);
      if (slot.role.empty()) throw Error(Errc::InvalidSchema, "slot '" + slot.slot_id + "' has an empty role");
      bool class_constraint = std::holds_alternative<Gupri>(slot.constraint);
      if (class_constraint != (slot.kind == SlotKind::Resource)) {
        throw Error(Errc::InvalidSchema, "slot '" + slot.slot_id + "': constraint does not match kind");
      }
      if (class_constraint && std::get<Gupri>(slot.constraint).empty()) {
        throw Error(Errc::InvalidSchema, "slot '" + slot.slot_id + "': empty class constraint");
      }
      any_required = any_required || slot.required;
    }
    if (!any_required) throw Error(Errc::NoRequiredSlot, s.id.str());
  }

  const StatementSchema* find(const Gupri& id) const {
    auto it = schemas_.find(id);
    return it == schemas_.end() ? nullptr : &it->second;
  }

  const StatementSchema& get(const Gupri& id) const {
    if (const auto* s = find(id)) return *s;
    throw Error(Errc::UnknownSchema, id.str());
  }

  const std::map<Gupri, StatementSchema>& schemas() const noexcept { return schemas_; }

  // Sorted by canonical id.
  std::vector<Gupri> schemas_for_statement_type(const Terminology& terms, const Gupri& predicate) const {
    auto closure = terms.closure();
    std::vector<Gupri> out;
    for (const auto& [id, s] : schemas_)
      if (closure->same_class(s.statement_type, predicate, ClassLevel::Referential)) out.push_back(id);
    return out;
  }

 private:
  std::map<Gupri, StatementSchema> schemas_;
};

inline ValidationReport validate_against(const StatementSchema& schema, const Terminology& terms,
                                         const StatementInstance& inst, const ValidationOptions& opts = {}) {
  ValidationReport report;
  auto closure = terms.closure(opts.min_confidence);
  auto add = [&](ViolationKind k, const std::string& slot, std::string detail) {
    report.violations.push_back({k, slot, std::move(detail)});
  };
  for (const auto& slot : schema.slots) {
    if (slot.required && !inst.fills.count(slot.slot_id)) add(ViolationKind::MissingRequiredSlot, slot.slot_id, "");
  }
  for (const auto& [slot_id, fill] : inst.fills) {
    const SlotSpec* slot = schema.slot(slot_id);
    if (!slot) {
      add(ViolationKind::UnknownSlot, slot_id, "");
      continue;
    }
    if (fill_kind(fill) != slot->kind) {
      add(ViolationKind::KindMismatch, slot_id,
          "expected " + std::string(slot_kind_name(slot->kind)) + ", got " + std::string(slot_kind_name(fill_kind(fill))));
      continue;
    }
    if (const auto* lit = std::get_if<LiteralFill>(&fill)) {
      if (lit->datatype != slot->datatype()) {
        add(ViolationKind::DatatypeMismatch, slot_id,
            "expected " + std::string(datatype_name(slot->datatype())) + ", got " +
                std::string(datatype_name(lit->datatype)));
      } else if (!literal_parses(lit->value, lit->datatype)) {
        add(ViolationKind::LiteralParseFailure, slot_id,
            "'" + lit->value + "' is not a valid " + std::string(datatype_name(lit->datatype)));
      }
    } else {
      const auto& res = std::get<ResourceFill>(fill);
      if (!satisfies_constraint(*closure, res.classifier(), slot->class_constraint(), opts.strict)) {
        add(ViolationKind::ConstraintFailure, slot_id,
            res.classifier().str() + " does not satisfy " + slot->class_constraint().str());
      }
    }
  }
  report.valid = report.violations.empty();
  return report;
}

inline ValidationReport validate_instance(const SchemaRegistry& schemas, const Terminology& terms,
                                          const StatementInstance& inst, const ValidationOptions& opts = {}) {
  return validate_against(schemas.get(inst.schema_id), terms, inst, opts);
}

struct DuplicateGroup {
  Gupri statement_type;
  std::vector<Gupri> schema_ids;
  bool crosswalk_covered = false;
};

// Schemas grouped by the referential class of their statement type. A group
// is covered when the crosswalk links (taken undirected, composable through
// any schema) connect every pair of its members.
inline std::vector<DuplicateGroup> detect_schema_duplicates(const SchemaRegistry& schemas, const Terminology& terms,
                                                            std::span<const std::pair<Gupri, Gupri>> links) {
  auto closure = terms.closure();
  std::map<Gupri, std::vector<Gupri>> by_type;
  std::map<Gupri, Gupri> type_label;
  for (const auto& [id, s] : schemas.schemas()) {
    auto cls = closure->equivalence_class(s.statement_type, ClassLevel::Referential);
    Gupri key = *std::min_element(cls.begin(), cls.end());
    by_type[key].push_back(id);
    auto it = type_label.find(key);
    if (it == type_label.end() || s.statement_type < it->second) type_label[key] = s.statement_type;
  }

  std::map<Gupri, std::size_t> index;
  for (const auto& [a, b] : links) {
    index.emplace(a, index.size());
    index.emplace(b, index.size());
  }
  detail::DisjointSets ds(index.size());
  for (const auto& [a, b] : links) ds.unite(index.at(a), index.at(b));

  std::vector<DuplicateGroup> out;
  for (const auto& [key, ids] : by_type) {
    if (ids.size() < 2) continue;
    DuplicateGroup g{type_label.at(key), ids, true};
    for (std::size_t i = 1; i < ids.size() && g.crosswalk_covered; ++i) {
      auto a = index.find(ids[0]), b = index.find(ids[i]);
      g.crosswalk_covered = a != index.end() && b != index.end() && ds.find(a->second) == ds.find(b->second);
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---- document forms --------------------------------------------------------

inline json to_json(const StatementSchema& s, const PrefixMap& pm) {
  json slots = json::array();
  for (const auto& slot : s.slots) {
    slots.push_back(json{{"slot_id", slot.slot_id},
                         {"role", slot.role},
                         {"kind", slot_kind_name(slot.kind)},
                         {"constraint", slot.kind == SlotKind::Resource ? pm.compact(slot.class_constraint())
                                                                        : std::string(datatype_name(slot.datatype()))},
                         {"required", slot.required}});
  }
  json j{{"id", pm.compact(s.id)},
         {"statement_type", pm.compact(s.statement_type)},
         {"label", s.label},
         {"logical_framework", s.logical_framework ? json(*s.logical_framework) : json(nullptr)},
         {"slots", slots}};
  if (!s.example_queries.empty()) j["example_queries"] = s.example_queries;
  return j;
}

inline StatementSchema schema_from_json(const json& j, const PrefixMap& pm) {
  const std::string ctx = "schema document";
  if (!j.is_object()) throw Error(Errc::InvalidSchema, ctx + ": expected an object");
  StatementSchema s;
  s.id = pm.canonicalize(jsonu::req_string(j, "id", Errc::InvalidSchema, ctx));
  s.statement_type = pm.canonicalize(jsonu::req_string(j, "statement_type", Errc::InvalidSchema, ctx));
  s.label = jsonu::opt_string(j, "label", Errc::InvalidSchema, ctx).value_or("");
  s.logical_framework = jsonu::opt_string(j, "logical_framework", Errc::InvalidSchema, ctx);
  const json& slots = jsonu::require(j, "slots", Errc::InvalidSchema, ctx);
  if (!slots.is_array()) throw Error(Errc::InvalidSchema, ctx + ": slots must be an array");
  for (const auto& sj : slots) {
    SlotSpec slot;
    slot.slot_id = jsonu::req_string(sj, "slot_id", Errc::InvalidSchema, ctx);
    slot.role = jsonu::req_string(sj, "role", Errc::InvalidSchema, ctx);
    auto kind = jsonu::req_string(sj, "kind", Errc::InvalidSchema, ctx);
    auto constraint = jsonu::req_string(sj, "constraint", Errc::InvalidSchema, ctx);
    if (kind == "resource") {
      slot.kind = SlotKind::Resource;
      slot.constraint = pm.canonicalize(constraint);
    } else if (kind == "literal") {
      slot.kind = SlotKind::Literal;
      auto d = parse_datatype(constraint);
      if (!d) throw Error(Errc::InvalidSchema, ctx + ": unknown datatype '" + constraint + "'");
      slot.constraint = *d;
    } else {
      throw Error(Errc::InvalidSchema, ctx + ": unknown slot kind '" + kind + "'");
    }
    if (sj.contains("required")) {
      if (!sj["required"].is_boolean()) throw Error(Errc::InvalidSchema, ctx + ": required must be boolean");
      slot.required = sj["required"].get<bool>();
    }
    s.slots.push_back(std::move(slot));
  }
  if (j.contains("example_queries")) {
    for (const auto& q : j["example_queries"]) {
      if (!q.is_string()) throw Error(Errc::InvalidSchema, ctx + ": example queries must be strings");
      s.example_queries.push_back(q.get<std::string>());
    }
  }
  return s;
}

inline json to_json(const SlotFill& f, const PrefixMap& pm) {
  if (const auto* r = std::get_if<ResourceFill>(&f)) {
    json j{{"kind", "resource"}, {"value", pm.compact(r->value)}};
    if (r->asserted_class) j["asserted_class"] = pm.compact(*r->asserted_class);
    return j;
  }
  const auto& l = std::get<LiteralFill>(f);
  return json{{"kind", "literal"}, {"value", l.value}, {"datatype", datatype_name(l.datatype)}};
}

inline json to_json(const StatementInstance& inst, const PrefixMap& pm) {
  json fills = json::object();
  for (const auto& [slot, fill] : inst.fills) fills[slot] = to_json(fill, pm);
  json j{{"schema", pm.compact(inst.schema_id)}, {"fills", fills}};
  if (inst.provenance) j["provenance"] = *inst.provenance;
  return j;
}

// Structural problems raise InvalidInstance; identifiers that do not resolve
// through the prefix map raise InvalidGupri.
inline StatementInstance instance_from_json(const json& j, const PrefixMap& pm) {
  const std::string ctx = "instance document";
  if (!j.is_object()) throw Error(Errc::InvalidInstance, ctx + ": expected an object");
  auto schema = jsonu::req_string(j, "schema", Errc::InvalidInstance, ctx);
  const json& fills = jsonu::require(j, "fills", Errc::InvalidInstance, ctx);
  if (!fills.is_object()) throw Error(Errc::InvalidInstance, ctx + ": fills must be an object");
  auto provenance = jsonu::opt_string(j, "provenance", Errc::InvalidInstance, ctx);

  // Check the shape fully before resolving any identifier.
  struct RawFill {
    std::string slot, kind, value;
    std::optional<std::string> extra;
  };
  std::vector<RawFill> raw;
  for (const auto& [slot, fj] : fills.items()) {
    RawFill r{slot, jsonu::req_string(fj, "kind", Errc::InvalidInstance, ctx),
              jsonu::req_string(fj, "value", Errc::InvalidInstance, ctx), std::nullopt};
    if (r.kind == "resource") {
      r.extra = jsonu::opt_string(fj, "asserted_class", Errc::InvalidInstance, ctx);
    } else if (r.kind == "literal") {
      r.extra = jsonu::req_string(fj, "datatype", Errc::InvalidInstance, ctx);
      if (!parse_datatype(*r.extra)) throw Error(Errc::InvalidInstance, ctx + ": unknown datatype '" + *r.extra + "'");
    } else {
      throw Error(Errc::InvalidInstance, ctx + ": unknown fill kind '" + r.kind + "'");
    }
    raw.push_back(std::move(r));
  }

  StatementInstance inst;
  inst.schema_id = pm.canonicalize(schema);
  inst.provenance = provenance;
  for (auto& r : raw) {
    if (r.kind == "resource") {
      ResourceFill f{pm.canonicalize(r.value), std::nullopt};
      if (r.extra) f.asserted_class = pm.canonicalize(*r.extra);
      inst.fills.emplace(r.slot, std::move(f));
    } else {
      inst.fills.emplace(r.slot, LiteralFill{r.value, *parse_datatype(*r.extra)});
    }
  }
  return inst;
}

inline json to_json(const ValidationReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    json vj{{"kind", violation_name(v.kind)}, {"slot", v.slot}};
    if (!v.detail.empty()) vj["detail"] = v.detail;
    violations.push_back(std::move(vj));
  }
  return json{{"valid", r.valid}, {"violations", violations}};
}

inline json to_json(const DuplicateGroup& g, const PrefixMap& pm) {
  json ids = json::array();
  for (const auto& id : g.schema_ids) ids.push_back(pm.compact(id));
  return json{{"statement_type", pm.compact(g.statement_type)}, {"schema_ids", ids},
              {"crosswalk_covered", g.crosswalk_covered}};
}

}  // namespace interlex
