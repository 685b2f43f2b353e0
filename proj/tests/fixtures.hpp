#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "interlex/store.hpp"

namespace fx {

using namespace interlex;

inline PrefixMap prefixes() {
  PrefixMap pm = PrefixMap::standard();
  pm.add("ex", "https://example.org/");
  pm.add("pato", "http://purl.obolibrary.org/obo/pato#");
  pm.add("ncit", "http://purl.obolibrary.org/obo/ncit#");
  pm.add("BFO", "http://purl.obolibrary.org/obo/BFO_");
  pm.add("UO", "http://purl.obolibrary.org/obo/UO_");
  pm.add("FOODON", "http://purl.obolibrary.org/obo/FOODON_");
  pm.add("UBERON", "http://purl.obolibrary.org/obo/UBERON_");
  pm.add("CARO", "http://purl.obolibrary.org/obo/CARO_");
  pm.add("OCIMIDO", "http://purl.obolibrary.org/obo/OCIMIDO_");
  return pm;
}

inline Gupri id(std::string_view curie) { return prefixes().canonicalize(curie); }

inline TermRecord full_term(std::string_view curie, const std::string& label) {
  TermRecord t;
  t.id = id(curie);
  t.labels = {{"en", label}, {"de", label + " (de)"}};
  t.definition = "A " + label + " as defined for testing.";
  t.recognition_criteria = "Recognised by inspection of a " + label + ".";
  t.synonyms = {label + " synonym"};
  t.referent_kind = ReferentKind::Class;
  return t;
}

inline EntityMapping mapping(std::string_view s, MappingPredicate p, std::string_view o, double confidence = 1.0) {
  EntityMapping m;
  m.subject = id(s);
  m.predicate = p;
  m.object = id(o);
  m.justification = "semapv:ManualMappingCuration";
  m.confidence = confidence;
  return m;
}

inline EntityMapping edge(const Gupri& s, MappingPredicate p, const Gupri& o) {
  EntityMapping m;
  m.subject = s;
  m.predicate = p;
  m.object = o;
  return m;
}

inline SlotSpec resource_slot(const std::string& slot, const std::string& role, std::string_view constraint,
                              bool required = true) {
  return SlotSpec{slot, role, SlotKind::Resource, id(constraint), required};
}

inline SlotSpec literal_slot(const std::string& slot, const std::string& role, Datatype dt, bool required = true) {
  return SlotSpec{slot, role, SlotKind::Literal, dt, required};
}

// OBI-style weight measurement: OBJECT HAS a QUALITY of VALUE UNIT.
inline StatementSchema obi_weight_schema() {
  StatementSchema s;
  s.id = id("ex:obi-weight");
  s.statement_type = id("ex:weightMeasurement");
  s.label = "weight measurement (OBI style)";
  s.logical_framework = "owl2-dl";
  s.slots = {resource_slot("OBJECT", "OBJECT", "BFO:0000040"), resource_slot("QUALITY", "QUALITY", "pato:weight"),
             literal_slot("VALUE", "VALUE", Datatype::Decimal), resource_slot("UNIT", "UNIT", "UO:0000002")};
  return s;
}

// OBOE-style weight measurement with its own slot names.
inline StatementSchema oboe_weight_schema() {
  StatementSchema s;
  s.id = id("ex:oboe-weight");
  s.statement_type = id("ex:weightMeasurement");
  s.label = "weight measurement (OBOE style)";
  s.logical_framework = "owl2-dl";
  s.slots = {resource_slot("entity", "OBJECT", "BFO:0000040"),
             resource_slot("characteristic", "QUALITY", "ncit:weight"),
             literal_slot("value", "VALUE", Datatype::Decimal), resource_slot("standard", "UNIT", "UO:0000002")};
  return s;
}

inline Crosswalk obi_to_oboe() {
  Crosswalk cw;
  cw.id = id("ex:cw-obi-oboe");
  cw.source_schema = id("ex:obi-weight");
  cw.target_schema = id("ex:oboe-weight");
  cw.alignments = {{"OBJECT", "entity"}, {"QUALITY", "characteristic"}, {"VALUE", "value"}, {"UNIT", "standard"}};
  cw.provenance = {"ex:curator", "2024-01-01", "manual alignment"};
  return cw;
}

inline StatementInstance apple_instance() {
  StatementInstance inst;
  inst.schema_id = id("ex:obi-weight");
  inst.fills.emplace("OBJECT", ResourceFill{id("ex:apple1"), id("FOODON:00002473")});
  inst.fills.emplace("QUALITY", ResourceFill{id("pato:weight"), std::nullopt});
  inst.fills.emplace("VALUE", LiteralFill{"212.45", Datatype::Decimal});
  inst.fills.emplace("UNIT", ResourceFill{id("UO:0000021"), id("UO:0000002")});
  return inst;
}

inline OperationDescriptor convert_unit_descriptor(std::string_view schema = "ex:obi-weight") {
  OperationDescriptor d;
  d.id = convert_unit_operation_id();
  d.label = "unit conversion";
  d.applicable_schemas = {id(schema)};
  d.kind = OperationKind::Builtin;
  d.params = {{"target_unit", Datatype::String}};
  return d;
}

struct WeightExample {
  bool weight_mapping = true;
  bool crosswalk = true;
  bool operation = false;
  bool fdo = false;
};

inline void add_weight_terms(Terminology& terms, const std::function<void(TermRecord&)>& tweak = {}) {
  for (auto [curie, label] : std::vector<std::pair<const char*, const char*>>{
           {"pato:weight", "weight"},
           {"ncit:weight", "weight"},
           {"BFO:0000040", "material entity"},
           {"FOODON:00002473", "apple"},
           {"UO:0000002", "mass unit"},
           {"UO:0000021", "gram"},
           {"UO:0000009", "kilogram"},
           {"UO:0000022", "milligram"},
           {"ex:weightMeasurement", "weight measurement"}}) {
    TermRecord t = full_term(curie, label);
    if (tweak) tweak(t);
    terms.register_term(t);
  }
  terms.add_mapping(mapping("FOODON:00002473", MappingPredicate::SubClassOf, "BFO:0000040"));
  for (const char* unit : {"UO:0000021", "UO:0000009", "UO:0000022"})
    terms.add_mapping(mapping(unit, MappingPredicate::SubClassOf, "UO:0000002"));
}

inline FdoRecord golden_fdo() {
  FdoRecord r;
  r.gupri = id("ex:fdo-apple-weight");
  r.content = apple_instance();
  r.schema_refs = {id("ex:obi-weight")};
  r.creator = "ex:lab-scale-17";
  r.authors = {"Alice Example"};
  r.category = StatementCategory::Assertional;
  r.logical_framework = "owl2-dl";
  r.human_readable = "apple weight 212.45 gram";
  r.certainty = Certainty::AssertedCertain;
  r.license = "CC-BY-4.0";
  r.provenance = {{"instrument", "scale-17"}};
  r.data_identifier = id("ex:dataset-17");
  return r;
}

inline Store weight_store(WeightExample opts = {}) {
  Store s;
  s.prefixes = prefixes();
  add_weight_terms(s.terms);
  if (opts.weight_mapping) s.terms.add_mapping(mapping("pato:weight", MappingPredicate::SameAs, "ncit:weight"));
  s.schemas.register_schema(obi_weight_schema());
  s.schemas.register_schema(oboe_weight_schema());
  if (opts.crosswalk) s.crosswalks.register_crosswalk(s.schemas, s.terms, obi_to_oboe());
  if (opts.operation) s.operations.register_operation(s.schemas, convert_unit_descriptor());
  if (opts.fdo) s.fdos.register_fdo(golden_fdo());
  return s;
}

inline Gupri term_n(int i) { return id("ex:t" + std::to_string(i)); }

// Random mapping set over terms ex:t0..ex:t(n-1).
inline std::vector<EntityMapping> random_mappings(std::mt19937& rng, int max_terms, int max_edges) {
  std::uniform_int_distribution<int> nterm(2, max_terms);
  int n = nterm(rng);
  std::uniform_int_distribution<int> nedge(0, max_edges), node(0, n - 1);
  std::uniform_int_distribution<int> pred(0, static_cast<int>(std::size(kPredicateTable)) - 1);
  int e = nedge(rng);
  std::vector<EntityMapping> out;
  for (int i = 0; i < e; ++i) {
    EntityMapping m;
    m.subject = term_n(node(rng));
    m.object = term_n(node(rng));
    m.predicate = static_cast<MappingPredicate>(pred(rng));
    m.justification = "semapv:LexicalMatching";
    out.push_back(m);
  }
  return out;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng{std::random_device{}()};
    path = std::filesystem::temp_directory_path() / ("interlex-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace fx
