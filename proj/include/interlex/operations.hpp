#pragma once

// Operations bound to schemas, the readable/interpretable/actionable ladder,
// X-interoperability, and the one builtin routine (exact unit conversion).

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "interlex/crosswalks.hpp"
#include "interlex/error.hpp"
#include "interlex/gupri.hpp"
#include "interlex/json_util.hpp"
#include "interlex/literal.hpp"
#include "interlex/schemas.hpp"
#include "interlex/terminology.hpp"

namespace interlex {

enum class OperationKind { Builtin, ExternalReference };

inline std::string_view operation_kind_name(OperationKind k) {
  return k == OperationKind::Builtin ? "builtin" : "external-reference";
}

struct OperationParam {
  std::string name;
  Datatype datatype = Datatype::String;

  friend bool operator==(const OperationParam&, const OperationParam&) = default;
};

struct OperationDescriptor {
  Gupri id;
  std::string label;
  std::set<Gupri> applicable_schemas;
  OperationKind kind = OperationKind::ExternalReference;
  std::vector<OperationParam> params;
  std::optional<std::string> tool;

  friend bool operator==(const OperationDescriptor&, const OperationDescriptor&) = default;
};

inline const Gupri& convert_unit_operation_id() {
  static const Gupri id = Gupri::absolute("urn:interlex:op:convert-unit");
  return id;
}

inline bool is_builtin_operation(const Gupri& id) { return id == convert_unit_operation_id(); }

class OperationRegistry {
 public:
  Gupri register_operation(const SchemaRegistry& schemas, OperationDescriptor d) {
    if (d.id.empty()) throw Error(Errc::InvalidGupri, "operation without id");
    if (d.applicable_schemas.empty()) throw Error(Errc::InvalidDescriptor, d.id.str() + ": no applicable schemas");
    if (d.kind == OperationKind::Builtin && !is_builtin_operation(d.id)) {
      throw Error(Errc::InvalidDescriptor, d.id.str() + " is not an implemented builtin");
    }
    for (const auto& s : d.applicable_schemas) schemas.get(s);
    auto it = ops_.find(d.id);
    if (it != ops_.end()) {
      if (it->second == d) return d.id;
      throw Error(Errc::ConflictingDescriptor, "different descriptor already registered as " + d.id.str());
    }
    Gupri id = d.id;
    ops_.emplace(id, std::move(d));
    return id;
  }

  const OperationDescriptor* find(const Gupri& id) const {
    auto it = ops_.find(id);
    return it == ops_.end() ? nullptr : &it->second;
  }

  const OperationDescriptor& get(const Gupri& id) const {
    if (const auto* d = find(id)) return *d;
    throw Error(Errc::UnknownOperation, id.str());
  }

  const std::map<Gupri, OperationDescriptor>& operations() const noexcept { return ops_; }

 private:
  std::map<Gupri, OperationDescriptor> ops_;
};

// Default bound on crosswalk chain length when looking for reachable schemas.
inline constexpr std::size_t kDefaultMaxCrosswalkPath = 3;

struct SchemaRoute {
  Gupri schema;
  std::vector<Gupri> crosswalk_path;
};

namespace detail {

// Breadth-first over directed crosswalks; each reachable schema keeps its
// first-found shortest path (crosswalks tried in id order).
inline std::map<Gupri, std::vector<Gupri>> reachable_schemas(const CrosswalkRegistry& crosswalks, const Gupri& start,
                                                            std::size_t max_depth) {
  std::map<Gupri, std::vector<std::pair<Gupri, Gupri>>> out_edges;  // source -> (crosswalk, target)
  for (const auto& [id, cw] : crosswalks.crosswalks()) {
    if (cw.source_schema != cw.target_schema) out_edges[cw.source_schema].emplace_back(id, cw.target_schema);
  }
  std::map<Gupri, std::vector<Gupri>> paths{{start, {}}};
  std::deque<Gupri> queue{start};
  while (!queue.empty()) {
    Gupri u = queue.front();
    queue.pop_front();
    if (paths[u].size() >= max_depth) continue;
    for (const auto& [cw_id, v] : out_edges[u]) {
      if (paths.count(v)) continue;
      auto p = paths[u];
      p.push_back(cw_id);
      paths.emplace(v, std::move(p));
      queue.push_back(v);
    }
  }
  return paths;
}

inline std::optional<SchemaRoute> nearest_applicable(const std::map<Gupri, std::vector<Gupri>>& paths,
                                                     const OperationDescriptor& op) {
  std::optional<SchemaRoute> best;
  for (const auto& s : op.applicable_schemas) {
    auto it = paths.find(s);
    if (it == paths.end()) continue;
    if (!best || it->second.size() < best->crosswalk_path.size()) best = SchemaRoute{s, it->second};
  }
  return best;
}

}  // namespace detail

struct ApplicableOperation {
  Gupri operation;
  SchemaRoute route;  // empty path: registered directly on the schema
};

struct ApplicableOperations {
  std::vector<ApplicableOperation> operations;  // ordered by operation id
  std::size_t degree() const noexcept { return operations.size(); }
};

inline ApplicableOperations applicable_operations(const SchemaRegistry& schemas, const CrosswalkRegistry& crosswalks,
                                                  const OperationRegistry& ops, const Gupri& schema,
                                                  bool include_reachable,
                                                  std::size_t max_depth = kDefaultMaxCrosswalkPath) {
  schemas.get(schema);
  auto paths = detail::reachable_schemas(crosswalks, schema, include_reachable ? max_depth : 0);
  ApplicableOperations result;
  for (const auto& [id, op] : ops.operations()) {
    if (auto route = detail::nearest_applicable(paths, op)) result.operations.push_back({id, std::move(*route)});
  }
  return result;
}

enum class Actionability { Unreadable, Readable, Interpretable, Actionable };

inline std::string_view actionability_name(Actionability a) {
  switch (a) {
    case Actionability::Unreadable: return "Unreadable";
    case Actionability::Readable: return "Readable";
    case Actionability::Interpretable: return "Interpretable";
    case Actionability::Actionable: return "Actionable";
  }
  return "Unreadable";
}

inline Actionability actionability_class(const Terminology& terms, const SchemaRegistry& schemas,
                                         const CrosswalkRegistry& crosswalks, const OperationRegistry& ops,
                                         const StatementInstance& inst) {
  if (!schemas.find(inst.schema_id)) return Actionability::Readable;
  for (const auto& t : classifier_terms(inst))
    if (!terms.find_term(t)) return Actionability::Readable;
  if (applicable_operations(schemas, crosswalks, ops, inst.schema_id, true).degree() == 0) {
    return Actionability::Interpretable;
  }
  return Actionability::Actionable;
}

// Total over arbitrary bytes: format failures are Unreadable, identifiers
// that do not resolve leave the input merely Readable.
inline Actionability actionability_class(const PrefixMap& pm, const Terminology& terms, const SchemaRegistry& schemas,
                                         const CrosswalkRegistry& crosswalks, const OperationRegistry& ops,
                                         std::string_view raw) {
  json j = json::parse(raw, nullptr, false);
  if (j.is_discarded()) return Actionability::Unreadable;
  try {
    return actionability_class(terms, schemas, crosswalks, ops, instance_from_json(j, pm));
  } catch (const Error& e) {
    return e.code() == Errc::InvalidGupri ? Actionability::Readable : Actionability::Unreadable;
  }
}

enum class XInteropKind { Direct, ViaCrosswalk, None };

struct XInteropResult {
  XInteropKind kind = XInteropKind::None;
  std::optional<SchemaRoute> route_a;
  std::optional<SchemaRoute> route_b;
};

inline XInteropResult x_interoperable(const SchemaRegistry& schemas, const CrosswalkRegistry& crosswalks,
                                      const OperationRegistry& ops, const Gupri& schema_a, const Gupri& schema_b,
                                      const Gupri& operation, std::size_t max_depth = kDefaultMaxCrosswalkPath) {
  schemas.get(schema_a);
  schemas.get(schema_b);
  const auto& op = ops.get(operation);
  XInteropResult r;
  r.route_a = detail::nearest_applicable(detail::reachable_schemas(crosswalks, schema_a, max_depth), op);
  r.route_b = detail::nearest_applicable(detail::reachable_schemas(crosswalks, schema_b, max_depth), op);
  if (!r.route_a || !r.route_b) {
    r.kind = XInteropKind::None;
  } else if (r.route_a->crosswalk_path.empty() && r.route_b->crosswalk_path.empty()) {
    r.kind = XInteropKind::Direct;
  } else {
    r.kind = XInteropKind::ViaCrosswalk;
  }
  return r;
}

// Mass units as powers of ten of the gram.
inline std::optional<int> unit_exponent(const Gupri& unit) {
  static const std::map<std::string, int> table{
      {"http://purl.obolibrary.org/obo/UO_0000022", -3},  // milligram
      {"http://purl.obolibrary.org/obo/UO_0000021", 0},   // gram
      {"http://purl.obolibrary.org/obo/UO_0000009", 3},   // kilogram
  };
  auto it = table.find(unit.str());
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline StatementInstance convert_unit(const SchemaRegistry& schemas, const Terminology& terms,
                                      const StatementInstance& inst, const std::string& value_slot,
                                      const std::string& unit_slot, const Gupri& target_unit) {
  const StatementSchema& schema = schemas.get(inst.schema_id);
  auto value_it = inst.fills.find(value_slot);
  auto unit_it = inst.fills.find(unit_slot);
  if (value_it == inst.fills.end()) throw Error(Errc::InvalidInstance, "no fill for value slot '" + value_slot + "'");
  if (unit_it == inst.fills.end()) throw Error(Errc::InvalidInstance, "no fill for unit slot '" + unit_slot + "'");
  const auto* unit = std::get_if<ResourceFill>(&unit_it->second);
  if (!unit) throw Error(Errc::UnknownUnit, "unit slot '" + unit_slot + "' holds a literal");
  auto from = unit_exponent(unit->value);
  if (!from) throw Error(Errc::UnknownUnit, unit->value.str());
  auto to = unit_exponent(target_unit);
  if (!to) throw Error(Errc::UnknownUnit, target_unit.str());
  const auto* value = std::get_if<LiteralFill>(&value_it->second);
  if (!value || value->datatype != Datatype::Decimal || !is_decimal(value->value)) {
    throw Error(Errc::NonDecimalValue, "value slot '" + value_slot + "' is not a decimal literal");
  }
  if (*from == *to && unit->value == target_unit) return inst;

  StatementInstance out = inst;
  std::get<LiteralFill>(out.fills[value_slot]).value = shift_decimal(value->value, *from - *to);
  std::get<ResourceFill>(out.fills[unit_slot]).value = target_unit;
  auto report = validate_against(schema, terms, out);
  if (!report.valid) {
    const auto& v = report.violations.front();
    throw Error(Errc::TargetInvalid, std::string(violation_name(v.kind)) + " on slot '" + v.slot + "'");
  }
  return out;
}

// ---- document forms --------------------------------------------------------

inline json to_json(const OperationDescriptor& d, const PrefixMap& pm) {
  json schemas = json::array();
  for (const auto& s : d.applicable_schemas) schemas.push_back(pm.compact(s));
  json params = json::array();
  for (const auto& p : d.params) params.push_back(json{{"name", p.name}, {"datatype", datatype_name(p.datatype)}});
  json j{{"id", pm.compact(d.id)},
         {"label", d.label},
         {"applicable_schemas", schemas},
         {"kind", operation_kind_name(d.kind)},
         {"params", params}};
  if (d.tool) j["tool"] = *d.tool;
  return j;
}

inline OperationDescriptor operation_from_json(const json& j, const PrefixMap& pm) {
  const std::string ctx = "operation descriptor";
  if (!j.is_object()) throw Error(Errc::InvalidDescriptor, ctx + ": expected an object");
  OperationDescriptor d;
  d.id = pm.canonicalize(jsonu::req_string(j, "id", Errc::InvalidDescriptor, ctx));
  d.label = jsonu::opt_string(j, "label", Errc::InvalidDescriptor, ctx).value_or("");
  const json& schemas = jsonu::require(j, "applicable_schemas", Errc::InvalidDescriptor, ctx);
  if (!schemas.is_array()) throw Error(Errc::InvalidDescriptor, ctx + ": applicable_schemas must be an array");
  for (const auto& s : schemas) {
    if (!s.is_string()) throw Error(Errc::InvalidDescriptor, ctx + ": schema ids must be strings");
    d.applicable_schemas.insert(pm.canonicalize(s.get<std::string>()));
  }
  auto kind = jsonu::opt_string(j, "kind", Errc::InvalidDescriptor, ctx).value_or("external-reference");
  if (kind == "builtin") {
    d.kind = OperationKind::Builtin;
  } else if (kind == "external-reference") {
    d.kind = OperationKind::ExternalReference;
  } else {
    throw Error(Errc::InvalidDescriptor, ctx + ": unknown kind '" + kind + "'");
  }
  if (j.contains("params")) {
    for (const auto& p : j["params"]) {
      auto dt = jsonu::req_string(p, "datatype", Errc::InvalidDescriptor, ctx);
      auto parsed = parse_datatype(dt);
      if (!parsed) throw Error(Errc::InvalidDescriptor, ctx + ": unknown datatype '" + dt + "'");
      d.params.push_back({jsonu::req_string(p, "name", Errc::InvalidDescriptor, ctx), *parsed});
    }
  }
  d.tool = jsonu::opt_string(j, "tool", Errc::InvalidDescriptor, ctx);
  return d;
}

inline json to_json(const SchemaRoute& r, const PrefixMap& pm) {
  json path = json::array();
  for (const auto& c : r.crosswalk_path) path.push_back(pm.compact(c));
  return json{{"schema", pm.compact(r.schema)}, {"crosswalk_path", path}};
}

inline json to_json(const ApplicableOperations& a, const PrefixMap& pm) {
  json ops = json::array();
  for (const auto& o : a.operations) {
    ops.push_back(json{{"operation", pm.compact(o.operation)}, {"via", to_json(o.route, pm)}});
  }
  return json{{"degree", a.degree()}, {"operations", ops}};
}

inline json to_json(const XInteropResult& r, const PrefixMap& pm) {
  static constexpr const char* names[] = {"true_direct", "true_via_crosswalk", "false"};
  json j{{"result", names[static_cast<int>(r.kind)]}};
  if (r.route_a) j["route_a"] = to_json(*r.route_a, pm);
  if (r.route_b) j["route_b"] = to_json(*r.route_b, pm);
  return j;
}

}  // namespace interlex
