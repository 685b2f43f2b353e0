#pragma once

// Schema crosswalks: slot alignments between two statement schemas, checked
// against the terminology closure, classified ontological or referential,
// composed, inverted and applied to instances. Also plans pairwise vs. hub
// crosswalk coverage for a set of schemas.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "interlex/error.hpp"
#include "interlex/gupri.hpp"
#include "interlex/json_util.hpp"
#include "interlex/schemas.hpp"
#include "interlex/terminology.hpp"

namespace interlex {

struct SlotAlignment {
  std::string source_slot;
  std::string target_slot;

  friend bool operator==(const SlotAlignment&, const SlotAlignment&) = default;
  friend auto operator<=>(const SlotAlignment&, const SlotAlignment&) = default;
};

enum class CrosswalkLevel { Referential = 0, Ontological = 1 };

inline std::string_view crosswalk_level_name(CrosswalkLevel l) {
  return l == CrosswalkLevel::Ontological ? "Ontological" : "Referential";
}

enum class AlignmentStatus { Equal, OntologicallyMapped, ReferentiallyMapped, RoleMismatch, Incompatible };

inline std::string_view alignment_status_name(AlignmentStatus s) {
  switch (s) {
    case AlignmentStatus::Equal: return "Equal";
    case AlignmentStatus::OntologicallyMapped: return "OntologicallyMapped";
    case AlignmentStatus::ReferentiallyMapped: return "ReferentiallyMapped";
    case AlignmentStatus::RoleMismatch: return "RoleMismatch";
    case AlignmentStatus::Incompatible: return "Incompatible";
  }
  return "Incompatible";
}

struct AlignmentResult {
  SlotAlignment alignment;
  AlignmentStatus status = AlignmentStatus::Incompatible;
};

struct CrosswalkReport {
  std::vector<AlignmentResult> alignments;
  std::vector<std::string> uncovered_required_source;
  std::vector<std::string> uncovered_required_target;
  bool all_slots_covered = false;

  bool has_blocking_status() const {
    return std::any_of(alignments.begin(), alignments.end(), [](const AlignmentResult& a) {
      return a.status == AlignmentStatus::Incompatible || a.status == AlignmentStatus::RoleMismatch;
    });
  }
  bool registrable() const { return !has_blocking_status() && uncovered_required_target.empty(); }

  std::optional<AlignmentStatus> status_of(std::string_view source_slot) const {
    for (const auto& a : alignments)
      if (a.alignment.source_slot == source_slot) return a.status;
    return std::nullopt;
  }
};

struct CrosswalkProvenance {
  std::string author;
  std::string date;
  std::string justification;

  friend bool operator==(const CrosswalkProvenance&, const CrosswalkProvenance&) = default;
};

struct Crosswalk {
  Gupri id;
  Gupri source_schema;
  Gupri target_schema;
  std::vector<SlotAlignment> alignments;
  CrosswalkProvenance provenance;
  // Computed on registration, composition and inversion.
  CrosswalkLevel level = CrosswalkLevel::Referential;
  CrosswalkReport report;

  // Identity of the authored content; level and report are derived.
  bool same_content(const Crosswalk& o) const {
    return id == o.id && source_schema == o.source_schema && target_schema == o.target_schema &&
           alignments == o.alignments && provenance == o.provenance;
  }

  bool is_identity() const {
    return source_schema == target_schema &&
           std::all_of(alignments.begin(), alignments.end(),
                       [](const SlotAlignment& a) { return a.source_slot == a.target_slot; });
  }
};

inline Gupri mint_crosswalk_id(std::string_view operation, const Gupri& a, const Gupri& b = {}) {
  std::string key = std::string(operation) + "\t" + a.str() + "\t" + b.str();
  return Gupri::absolute("urn:interlex:crosswalk:" + std::string(operation) + ":" + hex64(fnv1a64(key)));
}

// Statuses per alignment plus required-slot coverage on both sides.
inline CrosswalkReport check_crosswalk(const SchemaRegistry& schemas, const Terminology& terms, const Crosswalk& cw,
                                       double min_confidence = 0.0) {
  const StatementSchema& src = schemas.get(cw.source_schema);
  const StatementSchema& dst = schemas.get(cw.target_schema);
  auto closure = terms.closure(min_confidence);

  CrosswalkReport report;
  std::set<std::string> seen_src, seen_dst;
  for (const auto& a : cw.alignments) {
    const SlotSpec* s = src.slot(a.source_slot);
    const SlotSpec* t = dst.slot(a.target_slot);
    if (!s) throw Error(Errc::InvalidAlignment, "no slot '" + a.source_slot + "' in " + src.id.str());
    if (!t) throw Error(Errc::InvalidAlignment, "no slot '" + a.target_slot + "' in " + dst.id.str());
    if (!seen_src.insert(a.source_slot).second) throw Error(Errc::InvalidAlignment, "source slot '" + a.source_slot + "' aligned twice");
    if (!seen_dst.insert(a.target_slot).second) throw Error(Errc::InvalidAlignment, "target slot '" + a.target_slot + "' aligned twice");

    AlignmentStatus status;
    if (s->kind != t->kind) {
      status = AlignmentStatus::RoleMismatch;
    } else if (s->kind == SlotKind::Literal) {
      // No implicit datatype coercion.
      status = s->datatype() == t->datatype() ? AlignmentStatus::Equal : AlignmentStatus::Incompatible;
    } else {
      const auto& cs = s->class_constraint();
      const auto& ct = t->class_constraint();
      if (cs == ct) {
        status = AlignmentStatus::Equal;
      } else {
        auto level = closure->interop_level(cs, ct);
        status = level.at_least(Interop::Ontological)   ? AlignmentStatus::OntologicallyMapped
                 : level.at_least(Interop::Referential) ? AlignmentStatus::ReferentiallyMapped
                                                        : AlignmentStatus::Incompatible;
      }
    }
    report.alignments.push_back({a, status});
  }
  for (const auto& s : src.slots)
    if (s.required && !seen_src.count(s.slot_id)) report.uncovered_required_source.push_back(s.slot_id);
  for (const auto& t : dst.slots)
    if (t.required && !seen_dst.count(t.slot_id)) report.uncovered_required_target.push_back(t.slot_id);
  report.all_slots_covered = seen_src.size() == src.slots.size() && seen_dst.size() == dst.slots.size();
  return report;
}

// Ontological iff every slot of both schemas is aligned and every alignment
// is Equal or OntologicallyMapped.
inline CrosswalkLevel classify_report(const CrosswalkReport& report) {
  if (!report.registrable()) throw Error(Errc::InvalidCrosswalk, "crosswalk has blocking alignments or uncovered required target slots");
  bool ontological = report.all_slots_covered &&
                     std::all_of(report.alignments.begin(), report.alignments.end(), [](const AlignmentResult& a) {
                       return a.status == AlignmentStatus::Equal || a.status == AlignmentStatus::OntologicallyMapped;
                     });
  return ontological ? CrosswalkLevel::Ontological : CrosswalkLevel::Referential;
}

inline CrosswalkLevel classify_crosswalk(const SchemaRegistry& schemas, const Terminology& terms, const Crosswalk& cw) {
  return classify_report(check_crosswalk(schemas, terms, cw));
}

// Fills in report and level, raising the registration errors.
inline Crosswalk checked(const SchemaRegistry& schemas, const Terminology& terms, Crosswalk cw) {
  if (cw.id.empty()) throw Error(Errc::InvalidGupri, "crosswalk without id");
  if (cw.source_schema == cw.target_schema && !cw.is_identity()) {
    throw Error(Errc::InvalidCrosswalk, "a crosswalk from a schema to itself must align every slot to itself");
  }
  cw.report = check_crosswalk(schemas, terms, cw);
  for (const auto& a : cw.report.alignments) {
    if (a.status == AlignmentStatus::Incompatible || a.status == AlignmentStatus::RoleMismatch) {
      throw Error(Errc::IncompatibleAlignment, a.alignment.source_slot + " -> " + a.alignment.target_slot + " is " +
                                                   std::string(alignment_status_name(a.status)));
    }
  }
  if (!cw.report.uncovered_required_target.empty()) {
    throw Error(Errc::UncoveredRequiredTargetSlot, cw.report.uncovered_required_target.front());
  }
  cw.level = classify_report(cw.report);
  return cw;
}

class CrosswalkRegistry {
 public:
  Gupri register_crosswalk(const SchemaRegistry& schemas, const Terminology& terms, Crosswalk cw) {
    cw = checked(schemas, terms, std::move(cw));
    auto it = crosswalks_.find(cw.id);
    if (it != crosswalks_.end()) {
      if (it->second.same_content(cw)) return cw.id;
      throw Error(Errc::ConflictingCrosswalk, "different crosswalk already registered as " + cw.id.str());
    }
    Gupri id = cw.id;
    crosswalks_.emplace(id, std::move(cw));
    return id;
  }

  // Re-admits a stored crosswalk whose alignments may have lost their
  // supporting mappings since registration. Structure is still enforced;
  // the embedded report records the breakage.
  Gupri restore(const SchemaRegistry& schemas, const Terminology& terms, Crosswalk cw) {
    if (cw.id.empty()) throw Error(Errc::InvalidGupri, "crosswalk without id");
    if (cw.source_schema == cw.target_schema && !cw.is_identity()) {
      throw Error(Errc::InvalidCrosswalk, "a crosswalk from a schema to itself must align every slot to itself");
    }
    cw.report = check_crosswalk(schemas, terms, cw);
    cw.level = cw.report.registrable() ? classify_report(cw.report) : CrosswalkLevel::Referential;
    if (crosswalks_.count(cw.id)) throw Error(Errc::ConflictingCrosswalk, "crosswalk stored twice as " + cw.id.str());
    Gupri id = cw.id;
    crosswalks_.emplace(id, std::move(cw));
    return id;
  }

  void remove(const Gupri& id) {
    if (crosswalks_.erase(id) == 0) throw Error(Errc::UnknownCrosswalk, id.str());
  }

  const Crosswalk* find(const Gupri& id) const {
    auto it = crosswalks_.find(id);
    return it == crosswalks_.end() ? nullptr : &it->second;
  }

  const Crosswalk& get(const Gupri& id) const {
    if (const auto* c = find(id)) return *c;
    throw Error(Errc::UnknownCrosswalk, id.str());
  }

  const std::map<Gupri, Crosswalk>& crosswalks() const noexcept { return crosswalks_; }

  // Directed (source, target) pairs, one per registered crosswalk.
  std::vector<std::pair<Gupri, Gupri>> links() const {
    std::vector<std::pair<Gupri, Gupri>> out;
    for (const auto& [id, cw] : crosswalks_) out.emplace_back(cw.source_schema, cw.target_schema);
    return out;
  }

 private:
  std::map<Gupri, Crosswalk> crosswalks_;
};

inline Crosswalk compose_crosswalks(const SchemaRegistry& schemas, const Terminology& terms, const Crosswalk& ab,
                                    const Crosswalk& bc) {
  if (ab.target_schema != bc.source_schema) {
    throw Error(Errc::SchemaMismatch, ab.target_schema.str() + " != " + bc.source_schema.str());
  }
  auto level_ab = classify_crosswalk(schemas, terms, ab);
  auto level_bc = classify_crosswalk(schemas, terms, bc);

  Crosswalk out;
  out.id = mint_crosswalk_id("compose", ab.id, bc.id);
  out.source_schema = ab.source_schema;
  out.target_schema = bc.target_schema;
  std::map<std::string, std::string> second;
  for (const auto& a : bc.alignments) second.emplace(a.source_slot, a.target_slot);
  for (const auto& a : ab.alignments) {
    auto it = second.find(a.target_slot);
    if (it != second.end()) out.alignments.push_back({a.source_slot, it->second});
  }
  out.provenance = {ab.provenance.author == bc.provenance.author ? ab.provenance.author
                                                                 : ab.provenance.author + "; " + bc.provenance.author,
                    std::max(ab.provenance.date, bc.provenance.date), "composition"};
  out.report = check_crosswalk(schemas, terms, out);
  if (!out.report.uncovered_required_target.empty()) {
    throw Error(Errc::JoinProducesUncoveredRequiredSlot, out.report.uncovered_required_target.front());
  }
  if (out.report.has_blocking_status()) throw Error(Errc::InvalidCrosswalk, "composed alignment is incompatible");
  out.level = std::min(level_ab, level_bc);
  return out;
}

inline Crosswalk invert_crosswalk(const SchemaRegistry& schemas, const Terminology& terms, const Crosswalk& cw) {
  if (cw.is_identity()) return checked(schemas, terms, cw);
  Crosswalk inv;
  inv.id = mint_crosswalk_id("invert", cw.id);
  inv.source_schema = cw.target_schema;
  inv.target_schema = cw.source_schema;
  for (const auto& a : cw.alignments) inv.alignments.push_back({a.target_slot, a.source_slot});
  inv.provenance = cw.provenance;
  inv.provenance.justification = "inversion";
  try {
    return checked(schemas, terms, std::move(inv));
  } catch (const Error& e) {
    if (e.code() == Errc::UncoveredRequiredTargetSlot || e.code() == Errc::IncompatibleAlignment ||
        e.code() == Errc::InvalidAlignment) {
      throw Error(Errc::NotInvertible, e.what());
    }
    throw;
  }
}

struct TransformOptions {
  double min_confidence = 0.0;
  bool allow_referential = true;
};

struct TransformResult {
  StatementInstance instance;
  std::vector<std::string> warnings;
};

namespace detail {

// Picks the term a resource fill carries into a slot constrained by
// `constraint`. A term already on the constraint (or below it in the stored
// hierarchy) is kept; otherwise the lexicographically first member of its
// ontological class that is, then of its referential class.
inline Gupri resolve_term(const Terminology& terms, const ClosureSnapshot& closure, const Gupri& term,
                          const Gupri& constraint, const TransformOptions& opts, const std::string& slot) {
  auto direct = [&](const Gupri& m) { return terms.direct_hierarchy_path(m, constraint, opts.min_confidence); };
  if (direct(term)) return term;
  auto ontological = closure.equivalence_class(term, ClassLevel::Ontological);
  for (const auto& m : ontological)
    if (m != term && direct(m)) return m;
  for (const auto& m : closure.equivalence_class(term, ClassLevel::Referential)) {
    if (std::binary_search(ontological.begin(), ontological.end(), m) || !direct(m)) continue;
    if (!opts.allow_referential) {
      throw Error(Errc::ReferentialDisallowed,
                  "slot '" + slot + "': " + term.str() + " maps to " + m.str() + " only referentially");
    }
    return m;
  }
  if (satisfies_constraint(closure, term, constraint, !opts.allow_referential)) return term;
  throw Error(Errc::NoMappedTerm, "slot '" + slot + "': no mapping from " + term.str() + " to " + constraint.str());
}

}  // namespace detail

inline TransformResult transform_instance(const SchemaRegistry& schemas, const Terminology& terms,
                                          const StatementInstance& inst, const Crosswalk& cw,
                                          const TransformOptions& opts = {}) {
  if (inst.schema_id != cw.source_schema) {
    throw Error(Errc::SchemaMismatch, "instance uses " + inst.schema_id.str() + ", crosswalk reads " + cw.source_schema.str());
  }
  const StatementSchema& src = schemas.get(cw.source_schema);
  const StatementSchema& dst = schemas.get(cw.target_schema);
  auto source_report = validate_against(src, terms, inst, {false, opts.min_confidence});
  if (!source_report.valid) {
    const auto& v = source_report.violations.front();
    throw Error(Errc::SourceInvalid, std::string(violation_name(v.kind)) + " on slot '" + v.slot + "'");
  }
  auto closure = terms.closure(opts.min_confidence);

  std::map<std::string, std::string> target_to_source;
  std::set<std::string> aligned_sources;
  for (const auto& a : cw.alignments) {
    target_to_source.emplace(a.target_slot, a.source_slot);
    aligned_sources.insert(a.source_slot);
  }

  TransformResult result;
  result.instance.schema_id = dst.id;
  result.instance.provenance = inst.provenance;
  for (const auto& slot : dst.slots) {
    auto it = target_to_source.find(slot.slot_id);
    const SlotFill* fill = nullptr;
    if (it != target_to_source.end()) {
      auto f = inst.fills.find(it->second);
      if (f != inst.fills.end()) fill = &f->second;
    }
    if (!fill) {
      if (slot.required) throw Error(Errc::UnfillableRequiredTargetSlot, slot.slot_id);
      continue;
    }
    if (const auto* res = std::get_if<ResourceFill>(fill); res && !cw.is_identity()) {
      if (slot.kind != SlotKind::Resource) throw Error(Errc::InvalidCrosswalk, "slot '" + slot.slot_id + "' kind mismatch");
      ResourceFill out = *res;
      Gupri chosen = detail::resolve_term(terms, *closure, res->classifier(), slot.class_constraint(), opts, slot.slot_id);
      (out.asserted_class ? *out.asserted_class : out.value) = chosen;
      result.instance.fills.emplace(slot.slot_id, std::move(out));
    } else {
      result.instance.fills.emplace(slot.slot_id, *fill);
    }
  }
  for (const auto& [slot, fill] : inst.fills) {
    if (!aligned_sources.count(slot)) result.warnings.push_back("dropped unaligned source slot '" + slot + "'");
  }
  auto target_report = validate_against(dst, terms, result.instance, {!opts.allow_referential, opts.min_confidence});
  if (!target_report.valid) {
    const auto& v = target_report.violations.front();
    throw Error(Errc::TargetInvalid, std::string(violation_name(v.kind)) + " on slot '" + v.slot + "'");
  }
  return result;
}

// ---- planning ----------------------------------------------------------------

struct PlanStrategy {
  std::optional<Gupri> hub;  // empty: pairwise

  static PlanStrategy pairwise() { return {}; }
  static PlanStrategy with_hub(Gupri h) { return {std::move(h)}; }
};

using SchemaPair = std::pair<Gupri, Gupri>;  // ordered so that first < second

struct PlanReport {
  std::size_t required_count = 0;
  std::size_t existing_count = 0;
  std::vector<SchemaPair> required;
  std::vector<SchemaPair> missing;
  // Unordered pairs of the planned schemas connected once every required
  // link exists (registered crosswalks plus the plan).
  std::vector<SchemaPair> pairs_covered;
  // Unordered pairs connected by registered crosswalks alone.
  std::vector<SchemaPair> pairs_covered_existing;
};

inline SchemaPair unordered(const Gupri& a, const Gupri& b) { return a < b ? SchemaPair{a, b} : SchemaPair{b, a}; }

namespace detail {

inline std::vector<SchemaPair> connected_pairs(const std::vector<Gupri>& members, const std::vector<SchemaPair>& edges) {
  std::map<Gupri, std::size_t> index;
  for (const auto& m : members) index.emplace(m, index.size());
  for (const auto& [a, b] : edges) {
    index.emplace(a, index.size());
    index.emplace(b, index.size());
  }
  DisjointSets ds(index.size());
  for (const auto& [a, b] : edges) ds.unite(index.at(a), index.at(b));
  std::vector<SchemaPair> out;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (ds.find(index.at(members[i])) == ds.find(index.at(members[j]))) out.push_back(unordered(members[i], members[j]));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Pairwise: one link per unordered pair, n(n-1)/2. Hub: the hub is an extra
// reference schema and every other schema gets one spoke, n links (none when
// fewer than two schemas need connecting).
inline PlanReport plan_crosswalks(const SchemaRegistry& schemas, const CrosswalkRegistry& crosswalks,
                                  const std::vector<Gupri>& schema_ids, const PlanStrategy& strategy) {
  for (const auto& id : schema_ids) schemas.get(id);
  if (strategy.hub && !schemas.find(*strategy.hub)) throw Error(Errc::HubNotInSet, strategy.hub->str());

  std::set<Gupri> unique(schema_ids.begin(), schema_ids.end());
  std::vector<Gupri> members(unique.begin(), unique.end());
  PlanReport report;
  if (strategy.hub) {
    std::vector<Gupri> spokes;
    for (const auto& m : members)
      if (m != *strategy.hub) spokes.push_back(m);
    if (spokes.size() >= 2)
      for (const auto& s : spokes) report.required.push_back(unordered(*strategy.hub, s));
  } else {
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) report.required.push_back(unordered(members[i], members[j]));
  }
  std::sort(report.required.begin(), report.required.end());
  report.required_count = report.required.size();

  std::set<SchemaPair> registered;
  std::vector<SchemaPair> registered_edges;
  for (const auto& [a, b] : crosswalks.links()) {
    if (a == b) continue;
    registered.insert(unordered(a, b));
    registered_edges.push_back(unordered(a, b));
  }
  for (const auto& p : report.required) {
    if (registered.count(p)) {
      ++report.existing_count;
    } else {
      report.missing.push_back(p);
    }
  }
  auto all_edges = registered_edges;
  all_edges.insert(all_edges.end(), report.required.begin(), report.required.end());
  report.pairs_covered = detail::connected_pairs(members, all_edges);
  report.pairs_covered_existing = detail::connected_pairs(members, registered_edges);
  return report;
}

// ---- document forms --------------------------------------------------------

inline json to_json(const Crosswalk& cw, const PrefixMap& pm) {
  json alignments = json::array();
  for (const auto& a : cw.alignments) alignments.push_back(json{{"source_slot", a.source_slot}, {"target_slot", a.target_slot}});
  return json{{"id", pm.compact(cw.id)},
              {"source_schema", pm.compact(cw.source_schema)},
              {"target_schema", pm.compact(cw.target_schema)},
              {"alignments", alignments},
              {"provenance",
               {{"author", cw.provenance.author}, {"date", cw.provenance.date}, {"justification", cw.provenance.justification}}}};
}

inline Crosswalk crosswalk_from_json(const json& j, const PrefixMap& pm) {
  const std::string ctx = "crosswalk document";
  if (!j.is_object()) throw Error(Errc::InvalidCrosswalk, ctx + ": expected an object");
  Crosswalk cw;
  cw.id = pm.canonicalize(jsonu::req_string(j, "id", Errc::InvalidCrosswalk, ctx));
  cw.source_schema = pm.canonicalize(jsonu::req_string(j, "source_schema", Errc::InvalidCrosswalk, ctx));
  cw.target_schema = pm.canonicalize(jsonu::req_string(j, "target_schema", Errc::InvalidCrosswalk, ctx));
  const json& alignments = jsonu::require(j, "alignments", Errc::InvalidCrosswalk, ctx);
  if (!alignments.is_array()) throw Error(Errc::InvalidCrosswalk, ctx + ": alignments must be an array");
  for (const auto& a : alignments) {
    cw.alignments.push_back({jsonu::req_string(a, "source_slot", Errc::InvalidCrosswalk, ctx),
                             jsonu::req_string(a, "target_slot", Errc::InvalidCrosswalk, ctx)});
  }
  if (j.contains("provenance")) {
    const json& p = j["provenance"];
    cw.provenance.author = jsonu::opt_string(p, "author", Errc::InvalidCrosswalk, ctx).value_or("");
    cw.provenance.date = jsonu::opt_string(p, "date", Errc::InvalidCrosswalk, ctx).value_or("");
    cw.provenance.justification = jsonu::opt_string(p, "justification", Errc::InvalidCrosswalk, ctx).value_or("");
  }
  return cw;
}

inline json to_json(const CrosswalkReport& r) {
  json alignments = json::array();
  for (const auto& a : r.alignments) {
    alignments.push_back(json{{"source_slot", a.alignment.source_slot},
                              {"target_slot", a.alignment.target_slot},
                              {"status", alignment_status_name(a.status)}});
  }
  return json{{"alignments", alignments},
              {"uncovered_required_source", r.uncovered_required_source},
              {"uncovered_required_target", r.uncovered_required_target},
              {"all_slots_covered", r.all_slots_covered}};
}

inline json to_json(const PlanReport& r, const PrefixMap& pm) {
  auto pairs = [&](const std::vector<SchemaPair>& ps) {
    json arr = json::array();
    for (const auto& [a, b] : ps) arr.push_back(json::array({pm.compact(a), pm.compact(b)}));
    return arr;
  };
  return json{{"required_count", r.required_count},
              {"existing_count", r.existing_count},
              {"missing", pairs(r.missing)},
              {"pairs_covered", pairs(r.pairs_covered)},
              {"pairs_covered_existing", pairs(r.pairs_covered_existing)}};
}

}  // namespace interlex
