#pragma once

// Term registry, typed entity mappings and their closure.
//
// Mapping predicates fall into families. The ontological family (same
// meaning and referent) is a subset of the referential family (same referent),
// so every ontological edge also merges referential classes. Subclass and
// subproperty edges are transitive but directed; the SKOS close/related/broad
// predicates are recorded and reported but never feed the closure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interlex/error.hpp"
#include "interlex/gupri.hpp"
#include "interlex/json_util.hpp"

namespace interlex {

enum class MappingPredicate {
  SameAs,
  ExactMatch,
  EquivalentClass,
  ReferentialMatch,
  EquivalentProperty,
  SubClassOf,
  SubPropertyOf,
  CloseMatch,
  RelatedMatch,
  BroadMatch,
  NarrowMatch,
};

enum class PredicateFamily { Ontological, Referential, SubClass, SubProperty, Broad, Associative };

struct PredicateTraits {
  MappingPredicate predicate;
  std::string_view curie;
  std::string_view iri;
  std::string_view name;
  PredicateFamily family;
  bool transitive;
  bool symmetric;
  bool machine_actionable;
};

inline constexpr PredicateTraits kPredicateTable[] = {
    {MappingPredicate::SameAs, "owl:sameAs", "http://www.w3.org/2002/07/owl#sameAs", "SameAs",
     PredicateFamily::Ontological, true, true, true},
    {MappingPredicate::ExactMatch, "skos:exactMatch", "http://www.w3.org/2004/02/skos/core#exactMatch", "ExactMatch",
     PredicateFamily::Ontological, true, true, true},
    {MappingPredicate::EquivalentClass, "owl:equivalentClass", "http://www.w3.org/2002/07/owl#equivalentClass",
     "EquivalentClass", PredicateFamily::Referential, true, true, true},
    {MappingPredicate::ReferentialMatch, "new:referentialMatch", "", "ReferentialMatch", PredicateFamily::Referential,
     true, true, true},
    {MappingPredicate::EquivalentProperty, "owl:equivalentProperty",
     "http://www.w3.org/2002/07/owl#equivalentProperty", "EquivalentProperty", PredicateFamily::Referential, true,
     true, true},
    {MappingPredicate::SubClassOf, "rdfs:subClassOf", "http://www.w3.org/2000/01/rdf-schema#subClassOf", "SubClassOf",
     PredicateFamily::SubClass, true, false, true},
    {MappingPredicate::SubPropertyOf, "rdfs:subPropertyOf", "http://www.w3.org/2000/01/rdf-schema#subPropertyOf",
     "SubPropertyOf", PredicateFamily::SubProperty, true, false, true},
    {MappingPredicate::CloseMatch, "skos:closeMatch", "http://www.w3.org/2004/02/skos/core#closeMatch", "CloseMatch",
     PredicateFamily::Associative, false, true, false},
    {MappingPredicate::RelatedMatch, "skos:relatedMatch", "http://www.w3.org/2004/02/skos/core#relatedMatch",
     "RelatedMatch", PredicateFamily::Associative, false, true, false},
    {MappingPredicate::BroadMatch, "skos:broadMatch", "http://www.w3.org/2004/02/skos/core#broadMatch", "BroadMatch",
     PredicateFamily::Broad, false, false, false},
    {MappingPredicate::NarrowMatch, "skos:narrowMatch", "http://www.w3.org/2004/02/skos/core#narrowMatch",
     "NarrowMatch", PredicateFamily::Broad, false, false, false},
};

constexpr const PredicateTraits& traits(MappingPredicate p) {
  return kPredicateTable[static_cast<std::size_t>(p)];
}

// Accepts the CURIE spelling, the full IRI, or the enumerator name.
inline std::optional<MappingPredicate> parse_predicate(std::string_view text) {
  for (const auto& t : kPredicateTable) {
    if (text == t.curie || text == t.name || (!t.iri.empty() && text == t.iri)) return t.predicate;
  }
  return std::nullopt;
}

enum class MappingGrade { Ontological, Referential, Hierarchical, Associative };

constexpr MappingGrade mapping_grade(MappingPredicate p) {
  switch (traits(p).family) {
    case PredicateFamily::Ontological: return MappingGrade::Ontological;
    case PredicateFamily::Referential: return MappingGrade::Referential;
    case PredicateFamily::SubClass:
    case PredicateFamily::SubProperty:
    case PredicateFamily::Broad: return MappingGrade::Hierarchical;
    case PredicateFamily::Associative: return MappingGrade::Associative;
  }
  return MappingGrade::Associative;
}

enum class ReferentKind { Individual, Class, Property };

inline std::string_view referent_kind_name(ReferentKind k) {
  switch (k) {
    case ReferentKind::Individual: return "individual";
    case ReferentKind::Class: return "class";
    case ReferentKind::Property: return "property";
  }
  return "class";
}

inline std::optional<ReferentKind> parse_referent_kind(std::string_view s) {
  if (s == "individual") return ReferentKind::Individual;
  if (s == "class") return ReferentKind::Class;
  if (s == "property") return ReferentKind::Property;
  return std::nullopt;
}

struct TermRecord {
  Gupri id;
  std::map<std::string, std::string> labels;  // language tag -> text
  std::optional<std::string> definition;
  std::optional<std::string> recognition_criteria;
  bool recognition_criteria_applicable = true;
  std::vector<std::string> synonyms;
  ReferentKind referent_kind = ReferentKind::Class;

  friend bool operator==(const TermRecord&, const TermRecord&) = default;
};

inline const std::string kNoopMappingId = "noop";

struct EntityMapping {
  std::string id;
  Gupri subject;
  MappingPredicate predicate = MappingPredicate::SameAs;
  Gupri object;
  std::string justification = "unspecified";
  double confidence = 1.0;
  std::optional<std::string> author;
  std::optional<std::string> comment;

  friend bool operator==(const EntityMapping&, const EntityMapping&) = default;
};

inline std::string format_confidence(double c) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), c);
  return std::string(buf, res.ptr);
}

enum class Interop { None = 0, Associative, Hierarchical, Referential, Ontological, Identical };
enum class Direction { Broader, Narrower };

inline std::string_view interop_name(Interop l) {
  switch (l) {
    case Interop::None: return "None";
    case Interop::Associative: return "Associative";
    case Interop::Hierarchical: return "Hierarchical";
    case Interop::Referential: return "Referential";
    case Interop::Ontological: return "Ontological";
    case Interop::Identical: return "Identical";
  }
  return "None";
}

// Direction is relative to the first argument: Broader means the second term
// is broader than the first.
struct InteropLevel {
  Interop level = Interop::None;
  std::optional<Direction> direction;
  bool actionable = false;

  friend bool operator==(const InteropLevel&, const InteropLevel&) = default;
  bool at_least(Interop l) const { return level >= l; }
};

enum class ClassLevel { Ontological, Referential };

enum class CheckStatus { Pass, Fail, NotApplicable };

inline std::string_view check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not_applicable";
  }
  return "fail";
}

struct TermCheck {
  std::string name;
  std::string criterion;
  CheckStatus status = CheckStatus::Fail;
  bool advisory = false;
};

struct TermAudit {
  Gupri id;
  std::vector<TermCheck> checks;

  const TermCheck* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  bool passes(std::string_view name) const {
    const auto* c = find(name);
    return c && c->status == CheckStatus::Pass;
  }
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

// Class ids are assigned in order of each class's smallest member.
inline std::vector<std::size_t> label_components(DisjointSets& ds, std::size_t n,
                                                 std::vector<std::vector<std::size_t>>& classes) {
  std::vector<std::size_t> class_of(n);
  std::map<std::size_t, std::size_t> root_to_class;
  for (std::size_t i = 0; i < n; ++i) {
    auto root = ds.find(i);
    auto [it, inserted] = root_to_class.emplace(root, classes.size());
    if (inserted) classes.emplace_back();
    classes[it->second].push_back(i);
    class_of[i] = it->second;
  }
  return class_of;
}

}  // namespace detail

// Immutable result of closing a mapping set. Pure function of the node set
// and the edge multiset it was built from.
class ClosureSnapshot {
 public:
  ClosureSnapshot() = default;

  static ClosureSnapshot build(const std::vector<Gupri>& extra_nodes, const std::vector<const EntityMapping*>& edges) {
    ClosureSnapshot s;
    std::set<Gupri> node_set(extra_nodes.begin(), extra_nodes.end());
    for (const auto* e : edges) {
      node_set.insert(e->subject);
      node_set.insert(e->object);
    }
    s.nodes_.assign(node_set.begin(), node_set.end());
    for (std::size_t i = 0; i < s.nodes_.size(); ++i) s.index_.emplace(s.nodes_[i], i);

    const std::size_t n = s.nodes_.size();
    detail::DisjointSets ont(n), ref(n);
    for (const auto* e : edges) {
      auto a = s.index_.at(e->subject), b = s.index_.at(e->object);
      switch (traits(e->predicate).family) {
        case PredicateFamily::Ontological:
          ont.unite(a, b);
          ref.unite(a, b);
          break;
        case PredicateFamily::Referential:
          ref.unite(a, b);
          break;
        case PredicateFamily::Broad:
          s.broad_.emplace(a, b);  // b broader than a
          break;
        case PredicateFamily::Associative:
          s.associative_.emplace(std::min(a, b), std::max(a, b));
          break;
        default:
          break;
      }
    }
    s.ont_class_of_ = detail::label_components(ont, n, s.ont_classes_);
    s.ref_class_of_ = detail::label_components(ref, n, s.ref_classes_);

    const std::size_t rc = s.ref_classes_.size();
    std::vector<std::set<std::size_t>> up_class(rc), up_prop(rc);
    for (const auto* e : edges) {
      auto fam = traits(e->predicate).family;
      if (fam != PredicateFamily::SubClass && fam != PredicateFamily::SubProperty) continue;
      auto from = s.ref_class_of_[s.index_.at(e->subject)];
      auto to = s.ref_class_of_[s.index_.at(e->object)];
      (fam == PredicateFamily::SubClass ? up_class : up_prop)[from].insert(to);
    }
    s.class_ancestors_ = reachability(up_class);
    s.property_ancestors_ = reachability(up_prop);
    return s;
  }

  const std::vector<Gupri>& nodes() const noexcept { return nodes_; }

  std::optional<std::size_t> index_of(const Gupri& g) const {
    auto it = index_.find(g);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Gupri> equivalence_class(const Gupri& g, ClassLevel level) const {
    auto i = index_of(g);
    if (!i) return {g};
    const auto& classes = level == ClassLevel::Ontological ? ont_classes_ : ref_classes_;
    const auto& class_of = level == ClassLevel::Ontological ? ont_class_of_ : ref_class_of_;
    std::vector<Gupri> out;
    for (auto m : classes[class_of[*i]]) out.push_back(nodes_[m]);
    return out;
  }

  bool same_class(const Gupri& a, const Gupri& b, ClassLevel level) const {
    if (a == b) return true;
    auto ia = index_of(a), ib = index_of(b);
    if (!ia || !ib) return false;
    const auto& class_of = level == ClassLevel::Ontological ? ont_class_of_ : ref_class_of_;
    return class_of[*ia] == class_of[*ib];
  }

  // True when a's referential class reaches b's through one or more
  // subclass (or subproperty) steps.
  bool hierarchy_reaches(const Gupri& a, const Gupri& b) const {
    auto ia = index_of(a), ib = index_of(b);
    if (!ia || !ib) return false;
    auto ca = ref_class_of_[*ia], cb = ref_class_of_[*ib];
    return std::binary_search(class_ancestors_[ca].begin(), class_ancestors_[ca].end(), cb) ||
           std::binary_search(property_ancestors_[ca].begin(), property_ancestors_[ca].end(), cb);
  }

  InteropLevel interop_level(const Gupri& a, const Gupri& b) const {
    if (a == b) return {Interop::Identical, std::nullopt, true};
    auto ia = index_of(a), ib = index_of(b);
    if (!ia || !ib) return {};
    if (ont_class_of_[*ia] == ont_class_of_[*ib]) return {Interop::Ontological, std::nullopt, true};
    if (ref_class_of_[*ia] == ref_class_of_[*ib]) return {Interop::Referential, std::nullopt, true};
    if (hierarchy_reaches(a, b)) return {Interop::Hierarchical, Direction::Broader, true};
    if (hierarchy_reaches(b, a)) return {Interop::Hierarchical, Direction::Narrower, true};
    if (broad_.count({*ia, *ib})) return {Interop::Hierarchical, Direction::Broader, false};
    if (broad_.count({*ib, *ia})) return {Interop::Hierarchical, Direction::Narrower, false};
    if (associative_.count({std::min(*ia, *ib), std::max(*ia, *ib)})) return {Interop::Associative, std::nullopt, false};
    return {};
  }

  json to_json(const PrefixMap& pm) const {
    auto render_classes = [&](const std::vector<std::vector<std::size_t>>& classes) {
      json arr = json::array();
      for (const auto& c : classes) {
        if (c.size() < 2) continue;
        json members = json::array();
        for (auto m : c) members.push_back(pm.compact(nodes_[m]));
        arr.push_back(std::move(members));
      }
      return arr;
    };
    auto render_hierarchy = [&](const std::vector<std::vector<std::size_t>>& anc) {
      json arr = json::array();
      for (std::size_t c = 0; c < anc.size(); ++c) {
        if (anc[c].empty()) continue;
        json ancestors = json::array();
        for (auto a : anc[c]) ancestors.push_back(pm.compact(nodes_[ref_classes_[a].front()]));
        arr.push_back(json{{"class", pm.compact(nodes_[ref_classes_[c].front()])}, {"ancestors", ancestors}});
      }
      return arr;
    };
    return json{{"terms", nodes_.size()},
                {"ontological_classes", render_classes(ont_classes_)},
                {"referential_classes", render_classes(ref_classes_)},
                {"subclass_of", render_hierarchy(class_ancestors_)},
                {"subproperty_of", render_hierarchy(property_ancestors_)}};
  }

 private:
  static std::vector<std::vector<std::size_t>> reachability(const std::vector<std::set<std::size_t>>& up) {
    std::vector<std::vector<std::size_t>> out(up.size());
    for (std::size_t start = 0; start < up.size(); ++start) {
      std::vector<bool> seen(up.size(), false);
      std::deque<std::size_t> queue(up[start].begin(), up[start].end());
      for (auto c : up[start]) seen[c] = true;
      while (!queue.empty()) {
        auto c = queue.front();
        queue.pop_front();
        for (auto next : up[c]) {
          if (!seen[next]) {
            seen[next] = true;
            queue.push_back(next);
          }
        }
      }
      for (std::size_t c = 0; c < up.size(); ++c)
        if (seen[c]) out[start].push_back(c);
    }
    return out;
  }

  std::vector<Gupri> nodes_;
  std::map<Gupri, std::size_t> index_;
  std::vector<std::size_t> ont_class_of_, ref_class_of_;
  std::vector<std::vector<std::size_t>> ont_classes_, ref_classes_;
  std::vector<std::vector<std::size_t>> class_ancestors_, property_ancestors_;
  std::set<std::pair<std::size_t, std::size_t>> broad_;
  std::set<std::pair<std::size_t, std::size_t>> associative_;
};

struct ImportOptions {
  // Read rdfs:subClassOf / rdfs:subPropertyOf rows with the subject as the
  // parent, i.e. swap subject and object before storing.
  bool parent_first = false;
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct ImportReport {
  std::size_t accepted = 0;
  std::vector<RejectedRow> rejected;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> mapping_ids;
};

namespace detail {

inline std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

inline bool valid_language_tag(std::string_view tag) {
  if (tag.empty()) return false;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= tag.size()) {
    auto dash = tag.find('-', pos);
    auto sub = tag.substr(pos, dash == std::string_view::npos ? std::string_view::npos : dash - pos);
    if (first) {
      if (sub.size() < 2 || sub.size() > 3) return false;
      if (!std::all_of(sub.begin(), sub.end(), [](unsigned char c) { return c >= 'a' && c <= 'z'; })) return false;
    } else {
      if (sub.empty() || sub.size() > 8) return false;
      if (!std::all_of(sub.begin(), sub.end(), [](unsigned char c) { return std::isalnum(c); })) return false;
    }
    first = false;
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  return true;
}

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool has_line_break_or_tab(std::string_view s) {
  return s.find_first_of("\t\r\n") != std::string_view::npos;
}

}  // namespace detail

class Terminology {
 public:
  Gupri register_term(TermRecord record) {
    if (record.id.empty()) throw Error(Errc::InvalidGupri, "term record without id");
    record = normalized(std::move(record));
    auto it = terms_.find(record.id);
    if (it != terms_.end()) {
      if (it->second == record) return record.id;
      throw Error(Errc::ConflictingTermRecord, "different record already registered for " + record.id.str());
    }
    Gupri id = record.id;
    terms_.emplace(id, std::move(record));
    closure_.reset();
    return id;
  }

  const TermRecord* find_term(const Gupri& id) const {
    auto it = terms_.find(id);
    return it == terms_.end() ? nullptr : &it->second;
  }

  const TermRecord& term(const Gupri& id) const {
    if (const auto* t = find_term(id)) return *t;
    throw Error(Errc::UnknownTerm, id.str());
  }

  const std::map<Gupri, TermRecord>& terms() const noexcept { return terms_; }

  // Returns the stored id, or kNoopMappingId for a self-mapping.
  std::string add_mapping(EntityMapping m) {
    if (m.subject.empty() || m.object.empty()) throw Error(Errc::InvalidGupri, "mapping endpoint missing");
    if (!(m.confidence >= 0.0 && m.confidence <= 1.0)) {
      throw Error(Errc::MalformedRow, "confidence must lie in [0,1]");
    }
    for (const std::string* f : {&m.justification, m.author ? &*m.author : nullptr, m.comment ? &*m.comment : nullptr}) {
      if (f && detail::has_line_break_or_tab(*f)) throw Error(Errc::MalformedRow, "field contains tab or line break");
    }
    if (m.predicate == MappingPredicate::NarrowMatch) {
      std::swap(m.subject, m.object);
      m.predicate = MappingPredicate::BroadMatch;
    }
    if (m.subject == m.object) return kNoopMappingId;
    m.id = mint_id(m);
    if (!mappings_.count(m.id)) {
      mappings_.emplace(m.id, m);
      closure_.reset();
    }
    return m.id;
  }

  void remove_mapping(const std::string& id) {
    if (mappings_.erase(id) == 0) throw Error(Errc::UnknownMapping, id);
    closure_.reset();
  }

  const std::map<std::string, EntityMapping>& mappings() const noexcept { return mappings_; }

  // Export order: subject, predicate, object, id.
  std::vector<const EntityMapping*> sorted_mappings() const {
    std::vector<const EntityMapping*> out;
    for (const auto& [id, m] : mappings_) out.push_back(&m);
    std::sort(out.begin(), out.end(), [](const EntityMapping* a, const EntityMapping* b) {
      return std::tie(a->subject, a->predicate, a->object, a->id) < std::tie(b->subject, b->predicate, b->object, b->id);
    });
    return out;
  }

  ImportReport import_mappings_tsv(std::string_view text, const PrefixMap& pm, ImportOptions opts = {}) {
    ImportReport report;
    std::vector<std::string> lines;
    {
      std::istringstream in{std::string(text)};
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
      }
    }
    std::size_t i = 0;
    for (; i < lines.size(); ++i) {
      const auto& l = lines[i];
      if (l.empty()) continue;
      if (l.front() != '#') break;
      auto body = std::string_view(l).substr(1);
      auto colon = body.find(':');
      if (colon != std::string_view::npos) {
        auto trim = [](std::string_view s) {
          auto b = s.find_first_not_of(' ');
          auto e = s.find_last_not_of(' ');
          return b == std::string_view::npos ? std::string() : std::string(s.substr(b, e - b + 1));
        };
        report.metadata[trim(body.substr(0, colon))] = trim(body.substr(colon + 1));
      }
    }
    if (i >= lines.size()) throw Error(Errc::MissingRequiredColumn, "no header row");
    auto header = detail::split_tabs(lines[i]);
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
      for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) return c;
      return std::nullopt;
    };
    auto subj_col = column("subject_id"), pred_col = column("predicate_id"), obj_col = column("object_id");
    for (auto [col, name] : {std::pair{subj_col, "subject_id"}, {pred_col, "predicate_id"}, {obj_col, "object_id"}}) {
      if (!col) throw Error(Errc::MissingRequiredColumn, name);
    }
    auto just_col = column("mapping_justification"), conf_col = column("confidence"), comment_col = column("comment"),
         author_col = column("author_id");

    for (++i; i < lines.size(); ++i) {
      const auto& l = lines[i];
      const std::size_t line_no = i + 1;
      if (l.empty() || l.front() == '#') continue;
      auto fields = detail::split_tabs(l);
      if (fields.size() != header.size()) {
        report.rejected.push_back({line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                                std::to_string(fields.size())});
        continue;
      }
      try {
        EntityMapping m;
        m.subject = pm.canonicalize(fields[*subj_col]);
        m.object = pm.canonicalize(fields[*obj_col]);
        auto pred = parse_predicate(fields[*pred_col]);
        if (!pred) throw Error(Errc::UnknownPredicate, "'" + fields[*pred_col] + "'");
        m.predicate = *pred;
        if (opts.parent_first &&
            (m.predicate == MappingPredicate::SubClassOf || m.predicate == MappingPredicate::SubPropertyOf)) {
          std::swap(m.subject, m.object);
        }
        if (just_col && !fields[*just_col].empty()) m.justification = fields[*just_col];
        if (conf_col && !fields[*conf_col].empty()) {
          const auto& f = fields[*conf_col];
          double c = 0;
          auto res = std::from_chars(f.data(), f.data() + f.size(), c);
          if (res.ec != std::errc() || res.ptr != f.data() + f.size() || c < 0.0 || c > 1.0) {
            throw Error(Errc::MalformedRow, "confidence '" + f + "' not a number in [0,1]");
          }
          m.confidence = c;
        }
        if (comment_col && !fields[*comment_col].empty()) m.comment = fields[*comment_col];
        if (author_col && !fields[*author_col].empty()) m.author = fields[*author_col];
        report.mapping_ids.push_back(add_mapping(std::move(m)));
        ++report.accepted;
      } catch (const Error& e) {
        report.rejected.push_back({line_no, e.what()});
      }
    }
    return report;
  }

  std::string export_mappings_tsv(const PrefixMap& pm) const {
    std::string out = "subject_id\tpredicate_id\tobject_id\tmapping_justification\tconfidence\tcomment\tauthor_id\n";
    for (const auto* m : sorted_mappings()) {
      out += pm.compact(m->subject) + "\t" + std::string(traits(m->predicate).curie) + "\t" + pm.compact(m->object) +
             "\t" + m->justification + "\t" + format_confidence(m->confidence) + "\t" + m->comment.value_or("") +
             "\t" + m->author.value_or("") + "\n";
    }
    return out;
  }

  // Edges below min_confidence are dropped before closing.
  ClosureSnapshot compute_closure(double min_confidence = 0.0) const {
    std::vector<Gupri> nodes;
    for (const auto& [id, t] : terms_) nodes.push_back(id);
    return ClosureSnapshot::build(nodes, filtered_edges(min_confidence));
  }

  std::shared_ptr<const ClosureSnapshot> closure(double min_confidence = 0.0) const {
    if (min_confidence <= 0.0) return closure_.get([&] { return compute_closure(0.0); });
    return std::make_shared<const ClosureSnapshot>(compute_closure(min_confidence));
  }

  InteropLevel interop_level(const Gupri& a, const Gupri& b, double min_confidence = 0.0) const {
    return closure(min_confidence)->interop_level(a, b);
  }

  std::vector<Gupri> equivalence_class(const Gupri& a, ClassLevel level, double min_confidence = 0.0) const {
    return closure(min_confidence)->equivalence_class(a, level);
  }

  // Shortest witness path for the verdict interop_level(a, b) returns.
  // Among shortest paths the one with the lexicographically smallest
  // sequence of intermediate nodes wins; parallel edges resolve by id.
  std::vector<EntityMapping> explain_path(const Gupri& a, const Gupri& b, double min_confidence = 0.0) const {
    auto verdict = interop_level(a, b, min_confidence);
    auto edges = filtered_edges(min_confidence);
    if (verdict.level == Interop::None || verdict.level == Interop::Identical) return {};

    if (!verdict.actionable) {
      const EntityMapping* best = nullptr;
      for (const auto* e : edges) {
        auto fam = traits(e->predicate).family;
        bool fits = false;
        if (verdict.level == Interop::Associative && fam == PredicateFamily::Associative) {
          fits = (e->subject == a && e->object == b) || (e->subject == b && e->object == a);
        } else if (verdict.level == Interop::Hierarchical && fam == PredicateFamily::Broad) {
          fits = verdict.direction == Direction::Broader ? (e->subject == a && e->object == b)
                                                         : (e->subject == b && e->object == a);
        }
        if (fits && (!best || e->id < best->id)) best = e;
      }
      return best ? std::vector<EntityMapping>{*best} : std::vector<EntityMapping>{};
    }

    // Adjacency as (neighbor, edge). Equivalence edges are undirected;
    // hierarchy edges only point up (Broader) or down (Narrower).
    std::map<Gupri, std::vector<std::pair<Gupri, const EntityMapping*>>> out, in;
    auto link = [&](const Gupri& from, const Gupri& to, const EntityMapping* e) {
      out[from].emplace_back(to, e);
      in[to].emplace_back(from, e);
    };
    for (const auto* e : edges) {
      auto fam = traits(e->predicate).family;
      bool equiv = fam == PredicateFamily::Ontological ||
                   (fam == PredicateFamily::Referential && verdict.level <= Interop::Referential);
      if (equiv) {
        link(e->subject, e->object, e);
        link(e->object, e->subject, e);
      } else if (verdict.level == Interop::Hierarchical &&
                 (fam == PredicateFamily::SubClass || fam == PredicateFamily::SubProperty)) {
        if (verdict.direction == Direction::Broader) {
          link(e->subject, e->object, e);
        } else {
          link(e->object, e->subject, e);
        }
      }
    }
    std::map<Gupri, std::size_t> dist;
    std::deque<Gupri> queue{b};
    dist[b] = 0;
    while (!queue.empty()) {
      Gupri u = queue.front();
      queue.pop_front();
      for (const auto& [v, e] : in[u]) {
        if (!dist.count(v)) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    if (!dist.count(a)) return {};
    std::vector<EntityMapping> path;
    Gupri u = a;
    while (u != b) {
      const std::pair<Gupri, const EntityMapping*>* best = nullptr;
      for (const auto& step : out[u]) {
        auto d = dist.find(step.first);
        if (d == dist.end() || d->second + 1 != dist[u]) continue;
        if (!best || std::tie(step.first, step.second->id) < std::tie(best->first, best->second->id)) best = &step;
      }
      path.push_back(*best->second);
      u = best->first;
    }
    return path;
  }

  // Term-level hierarchy walk over stored subclass/subproperty edges only,
  // without lifting through equivalence classes.
  bool direct_hierarchy_path(const Gupri& from, const Gupri& to, double min_confidence = 0.0) const {
    if (from == to) return true;
    std::map<Gupri, std::vector<Gupri>> up;
    for (const auto* e : filtered_edges(min_confidence)) {
      auto fam = traits(e->predicate).family;
      if (fam == PredicateFamily::SubClass || fam == PredicateFamily::SubProperty) up[e->subject].push_back(e->object);
    }
    std::set<Gupri> seen{from};
    std::deque<Gupri> queue{from};
    while (!queue.empty()) {
      Gupri u = queue.front();
      queue.pop_front();
      for (const auto& v : up[u]) {
        if (v == to) return true;
        if (seen.insert(v).second) queue.push_back(v);
      }
    }
    return false;
  }

  TermAudit audit_term_fairness(const Gupri& id) const {
    const TermRecord& t = term(id);
    TermAudit audit{id, {}};
    auto status = [](bool ok) { return ok ? CheckStatus::Pass : CheckStatus::Fail; };
    audit.checks.push_back({"has_definition", "I4a", status(t.definition && !t.definition->empty()), false});
    audit.checks.push_back({"has_recognition_criteria", "I4b",
                            t.recognition_criteria_applicable
                                ? status(t.recognition_criteria && !t.recognition_criteria->empty())
                                : CheckStatus::NotApplicable,
                            false});
    audit.checks.push_back({"has_multilingual_labels", "F5.2a", status(t.labels.size() >= 2), false});
    audit.checks.push_back({"has_synonyms", "F5.2b", status(!t.synonyms.empty()), false});
    audit.checks.push_back(
        {"is_mapped", "F5.1", status(equivalence_class(id, ClassLevel::Referential).size() >= 2), true});
    return audit;
  }

  static TermRecord normalized(TermRecord r) {
    std::map<std::string, std::string> labels;
    for (auto& [tag, text] : r.labels) {
      auto lower = detail::lowercase(tag);
      if (!detail::valid_language_tag(lower)) {
        throw Error(Errc::InvalidTermRecord, "malformed language tag '" + tag + "'");
      }
      auto [it, inserted] = labels.emplace(lower, text);
      if (!inserted && it->second != text) {
        throw Error(Errc::InvalidTermRecord, "language tag '" + lower + "' given twice");
      }
    }
    r.labels = std::move(labels);
    std::vector<std::string> synonyms;
    std::set<std::string> seen;
    for (auto& s : r.synonyms)
      if (seen.insert(s).second) synonyms.push_back(std::move(s));
    r.synonyms = std::move(synonyms);
    return r;
  }

 private:
  static std::string mint_id(const EntityMapping& m) {
    std::string key = m.subject.str() + "\t" + std::string(traits(m.predicate).curie) + "\t" + m.object.str() + "\t" +
                      m.justification + "\t" + format_confidence(m.confidence) + "\t" + m.author.value_or("") +
                      "\t" + m.comment.value_or("");
    return "m" + hex64(fnv1a64(key));
  }

  std::vector<const EntityMapping*> filtered_edges(double min_confidence) const {
    std::vector<const EntityMapping*> out;
    for (const auto* m : sorted_mappings())
      if (m->confidence >= min_confidence) out.push_back(m);
    return out;
  }

  std::map<Gupri, TermRecord> terms_;
  std::map<std::string, EntityMapping> mappings_;
  LazySnapshot<ClosureSnapshot> closure_;
};

// ---- document forms --------------------------------------------------------

inline json to_json(const TermRecord& t, const PrefixMap& pm) {
  json j{{"id", pm.compact(t.id)}, {"labels", t.labels}, {"synonyms", t.synonyms},
         {"referent_kind", referent_kind_name(t.referent_kind)}};
  if (t.definition) j["definition"] = *t.definition;
  if (t.recognition_criteria) j["recognition_criteria"] = *t.recognition_criteria;
  if (!t.recognition_criteria_applicable) j["recognition_criteria_applicable"] = false;
  return j;
}

inline TermRecord term_from_json(const json& j, const PrefixMap& pm) {
  const std::string ctx = "term record";
  if (!j.is_object()) throw Error(Errc::InvalidTermRecord, ctx + ": expected an object");
  TermRecord t;
  t.id = pm.canonicalize(jsonu::req_string(j, "id", Errc::InvalidGupri, ctx));
  if (j.contains("labels")) {
    if (!j["labels"].is_object()) throw Error(Errc::InvalidTermRecord, ctx + ": labels must be an object");
    for (const auto& [tag, text] : j["labels"].items()) {
      if (!text.is_string()) throw Error(Errc::InvalidTermRecord, ctx + ": label text must be a string");
      t.labels[tag] = text.get<std::string>();
    }
  }
  t.definition = jsonu::opt_string(j, "definition", Errc::InvalidTermRecord, ctx);
  t.recognition_criteria = jsonu::opt_string(j, "recognition_criteria", Errc::InvalidTermRecord, ctx);
  if (j.contains("recognition_criteria_applicable")) {
    if (!j["recognition_criteria_applicable"].is_boolean())
      throw Error(Errc::InvalidTermRecord, ctx + ": recognition_criteria_applicable must be boolean");
    t.recognition_criteria_applicable = j["recognition_criteria_applicable"].get<bool>();
  }
  if (j.contains("synonyms")) {
    if (!j["synonyms"].is_array()) throw Error(Errc::InvalidTermRecord, ctx + ": synonyms must be an array");
    for (const auto& s : j["synonyms"]) {
      if (!s.is_string()) throw Error(Errc::InvalidTermRecord, ctx + ": synonym must be a string");
      t.synonyms.push_back(s.get<std::string>());
    }
  }
  if (auto kind = jsonu::opt_string(j, "referent_kind", Errc::InvalidTermRecord, ctx)) {
    auto k = parse_referent_kind(*kind);
    if (!k) throw Error(Errc::InvalidTermRecord, ctx + ": unknown referent_kind '" + *kind + "'");
    t.referent_kind = *k;
  }
  return t;
}

inline json to_json(const EntityMapping& m, const PrefixMap& pm) {
  json j{{"id", m.id},
         {"subject_id", pm.compact(m.subject)},
         {"predicate_id", traits(m.predicate).curie},
         {"object_id", pm.compact(m.object)},
         {"mapping_justification", m.justification},
         {"confidence", m.confidence}};
  if (m.author) j["author_id"] = *m.author;
  if (m.comment) j["comment"] = *m.comment;
  return j;
}

inline json to_json(const InteropLevel& l) {
  json j{{"level", interop_name(l.level)}, {"actionable", l.actionable}};
  if (l.direction) j["direction"] = *l.direction == Direction::Broader ? "broader" : "narrower";
  return j;
}

inline json to_json(const TermAudit& a, const PrefixMap& pm) {
  json checks = json::array();
  for (const auto& c : a.checks) {
    checks.push_back(json{{"check", c.name},
                          {"criterion", c.criterion},
                          {"status", check_status_name(c.status)},
                          {"advisory", c.advisory}});
  }
  return json{{"term", pm.compact(a.id)}, {"checks", checks}};
}

}  // namespace interlex
