#include <gtest/gtest.h>

#include <deque>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "interlex/terminology.hpp"

using namespace interlex;
using fx::id;

namespace {

std::set<Gupri> as_set(const std::vector<Gupri>& v) { return {v.begin(), v.end()}; }

Terminology venus() {
  Terminology t;
  t.add_mapping(fx::mapping("ex:MorningStar", MappingPredicate::EquivalentClass, "ex:Venus"));
  t.add_mapping(fx::mapping("ex:EveningStar", MappingPredicate::EquivalentClass, "ex:Venus"));
  return t;
}

// Reference semantics computed by Floyd-Warshall over an adjacency matrix.
struct Oracle {
  int n;
  std::vector<std::vector<bool>> ont, ref, up_class, up_prop, broad, assoc;

  Oracle(int n_, const std::vector<EntityMapping>& edges)
      : n(n_),
        ont(n, std::vector<bool>(n)),
        ref(ont),
        up_class(ont),
        up_prop(ont),
        broad(ont),
        assoc(ont) {
    auto idx = [](const Gupri& g) { return std::stoi(g.str().substr(g.str().rfind('t') + 1)); };
    for (int i = 0; i < n; ++i) ont[i][i] = ref[i][i] = true;
    for (const auto& e : edges) {
      int a = idx(e.subject), b = idx(e.object);
      if (a == b) continue;
      switch (traits(e.predicate).family) {
        case PredicateFamily::Ontological: ont[a][b] = ont[b][a] = ref[a][b] = ref[b][a] = true; break;
        case PredicateFamily::Referential: ref[a][b] = ref[b][a] = true; break;
        case PredicateFamily::SubClass: up_class[a][b] = true; break;
        case PredicateFamily::SubProperty: up_prop[a][b] = true; break;
        case PredicateFamily::Broad:
          if (e.predicate == MappingPredicate::NarrowMatch) std::swap(a, b);
          broad[a][b] = true;
          break;
        case PredicateFamily::Associative: assoc[a][b] = assoc[b][a] = true; break;
      }
    }
    close(ont);
    close(ref);
    for (auto* up : {&up_class, &up_prop}) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (ref[i][j]) (*up)[i][j] = true;
      close(*up);
    }
  }

  void close(std::vector<std::vector<bool>>& m) const {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        if (m[i][k])
          for (int j = 0; j < n; ++j)
            if (m[k][j]) m[i][j] = true;
  }

  Interop level(int a, int b) const {
    if (a == b) return Interop::Identical;
    if (ont[a][b]) return Interop::Ontological;
    if (ref[a][b]) return Interop::Referential;
    if (up_class[a][b] || up_prop[a][b] || up_class[b][a] || up_prop[b][a]) return Interop::Hierarchical;
    if (broad[a][b] || broad[b][a]) return Interop::Hierarchical;
    if (assoc[a][b]) return Interop::Associative;
    return Interop::None;
  }
};

}  // namespace

TEST(Gupri, CurieCanonicalizationIsIdempotent) {
  auto pm = fx::prefixes();
  Gupri g = pm.canonicalize("pato:weight");
  EXPECT_EQ(g.str(), "http://purl.obolibrary.org/obo/pato#weight");
  EXPECT_EQ(pm.canonicalize(g.str()), g);
  EXPECT_EQ(pm.compact(g), "pato:weight");
  EXPECT_THROW(pm.canonicalize("nope:thing"), Error);
  EXPECT_THROW(pm.canonicalize(""), Error);
}

TEST(Gupri, PrefixFileRoundTrip) {
  auto pm = fx::prefixes();
  auto text = pm.serialize();
  EXPECT_EQ(PrefixMap::parse(text, "prefixes").serialize(), text);
  try {
    PrefixMap::parse("# comment\nok\thttp://x.org/\nbroken-line\n", "prefixes");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.file(), "prefixes");
  }
}

TEST(Terminology, RegisterTermIsIdempotent) {
  Terminology t;
  TermRecord r;
  r.id = id("pato:weight");
  r.labels = {{"en", "weight"}};
  r.definition = "A physical quality that inheres in a bearer by virtue of the bearer's mass.";
  EXPECT_EQ(t.register_term(r), id("pato:weight"));
  EXPECT_EQ(t.register_term(r), id("pato:weight"));
  EXPECT_EQ(t.terms().size(), 1u);
  r.definition = "different";
  EXPECT_THROW(
      {
        try {
          t.register_term(r);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), Errc::ConflictingTermRecord);
          throw;
        }
      },
      Error);
}

TEST(Terminology, EmptyIdIsInvalid) {
  Terminology t;
  try {
    t.register_term(TermRecord{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidGupri);
  }
}

TEST(Terminology, TermRecordNormalization) {
  Terminology t;
  TermRecord r = fx::full_term("ex:a", "a");
  r.labels = {{"EN", "a"}, {"de", "a"}};
  r.synonyms = {"x", "y", "x"};
  t.register_term(r);
  const auto& stored = t.term(id("ex:a"));
  EXPECT_TRUE(stored.labels.count("en"));
  EXPECT_EQ(stored.synonyms, (std::vector<std::string>{"x", "y"}));
  TermRecord bad = fx::full_term("ex:b", "b");
  bad.labels = {{"not a tag", "b"}};
  EXPECT_THROW(t.register_term(bad), Error);
}

TEST(Terminology, MappingGrades) {
  Terminology t;
  auto a = t.add_mapping(fx::mapping("UBERON:0000468", MappingPredicate::ExactMatch, "OCIMIDO:00467"));
  auto b = t.add_mapping(fx::mapping("UBERON:0000468", MappingPredicate::EquivalentClass, "CARO:0000012"));
  EXPECT_EQ(t.mappings().size(), 2u);
  EXPECT_EQ(mapping_grade(t.mappings().at(a).predicate), MappingGrade::Ontological);
  EXPECT_EQ(mapping_grade(t.mappings().at(b).predicate), MappingGrade::Referential);
}

TEST(Terminology, SelfMappingIsNoop) {
  Terminology t;
  EXPECT_EQ(t.add_mapping(fx::mapping("ex:a", MappingPredicate::SameAs, "ex:a")), kNoopMappingId);
  EXPECT_TRUE(t.mappings().empty());
}

TEST(Terminology, PredicateFlagsFollowTheMappingTable) {
  for (const auto& p : kPredicateTable) {
    bool equivalence = p.family == PredicateFamily::Ontological || p.family == PredicateFamily::Referential;
    bool hierarchy = p.family == PredicateFamily::SubClass || p.family == PredicateFamily::SubProperty;
    EXPECT_EQ(p.transitive, equivalence || hierarchy) << p.name;
    EXPECT_EQ(p.machine_actionable, equivalence || hierarchy) << p.name;
    EXPECT_EQ(p.symmetric, equivalence || p.family == PredicateFamily::Associative) << p.name;
  }
  EXPECT_EQ(parse_predicate("new:referentialMatch"), MappingPredicate::ReferentialMatch);
  EXPECT_EQ(parse_predicate("http://www.w3.org/2002/07/owl#sameAs"), MappingPredicate::SameAs);
  EXPECT_FALSE(parse_predicate("owl:differentFrom"));
}

TEST(Terminology, NarrowMatchStoredAsInverseBroadMatch) {
  Terminology t;
  auto mid = t.add_mapping(fx::mapping("ex:general", MappingPredicate::NarrowMatch, "ex:specific"));
  const auto& m = t.mappings().at(mid);
  EXPECT_EQ(m.predicate, MappingPredicate::BroadMatch);
  EXPECT_EQ(m.subject, id("ex:specific"));
  EXPECT_EQ(m.object, id("ex:general"));
  auto v = t.interop_level(id("ex:specific"), id("ex:general"));
  EXPECT_EQ(v.level, Interop::Hierarchical);
  EXPECT_EQ(v.direction, Direction::Broader);
  EXPECT_FALSE(v.actionable);
}

TEST(MappingImport, HeaderAndOneRow) {
  Terminology t;
  auto r = t.import_mappings_tsv("# curie_map: obo\nsubject_id\tpredicate_id\tobject_id\nex:a\towl:sameAs\tex:b\n",
                                 fx::prefixes());
  EXPECT_EQ(r.accepted, 1u);
  EXPECT_TRUE(r.rejected.empty());
  EXPECT_EQ(r.metadata.at("curie_map"), "obo");
}

TEST(MappingImport, MissingPredicateColumn) {
  Terminology t;
  try {
    t.import_mappings_tsv("subject_id\tobject_id\nex:a\tex:b\n", fx::prefixes());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingRequiredColumn);
  }
}

TEST(MappingImport, MalformedRowIsReportedOthersIngested) {
  Terminology t;
  auto r = t.import_mappings_tsv(
      "subject_id\tpredicate_id\tobject_id\n"
      "ex:a\towl:sameAs\tex:b\n"
      "ex:b\towl:sameAs\n"
      "ex:c\tskos:exactMatch\tex:d\n",
      fx::prefixes());
  EXPECT_EQ(r.accepted, 2u);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].line, 3u);
}

TEST(MappingImport, Table1DirectionFlag) {
  const char* tsv = "subject_id\tpredicate_id\tobject_id\nex:animal\trdfs:subClassOf\tex:dog\n";
  Terminology standard, parent_first;
  standard.import_mappings_tsv(tsv, fx::prefixes());
  parent_first.import_mappings_tsv(tsv, fx::prefixes(), {true});
  EXPECT_EQ(standard.interop_level(id("ex:animal"), id("ex:dog")).direction, Direction::Broader);
  EXPECT_EQ(parent_first.interop_level(id("ex:dog"), id("ex:animal")).direction, Direction::Broader);
}

TEST(MappingImport, ExportReimportIsStable) {
  Terminology t;
  t.add_mapping(fx::mapping("ex:b", MappingPredicate::SameAs, "ex:a", 0.75));
  t.add_mapping(fx::mapping("ex:c", MappingPredicate::CloseMatch, "ex:a"));
  auto text = t.export_mappings_tsv(fx::prefixes());
  Terminology u;
  auto r = u.import_mappings_tsv(text, fx::prefixes());
  EXPECT_EQ(r.accepted, 2u);
  EXPECT_EQ(u.export_mappings_tsv(fx::prefixes()), text);
}

TEST(Closure, SameAsChainIsOneOntologicalClass) {
  Terminology t;
  t.add_mapping(fx::mapping("ex:a", MappingPredicate::SameAs, "ex:b"));
  t.add_mapping(fx::mapping("ex:b", MappingPredicate::SameAs, "ex:c"));
  t.add_mapping(fx::mapping("ex:c", MappingPredicate::SameAs, "ex:d"));
  EXPECT_EQ(as_set(t.equivalence_class(id("ex:a"), ClassLevel::Ontological)),
            (std::set<Gupri>{id("ex:a"), id("ex:b"), id("ex:c"), id("ex:d")}));
}

TEST(Closure, EmptyStoreGivesSingletons) {
  Terminology t;
  EXPECT_EQ(t.equivalence_class(id("ex:x"), ClassLevel::Ontological), std::vector<Gupri>{id("ex:x")});
  EXPECT_EQ(t.equivalence_class(id("ex:x"), ClassLevel::Referential), std::vector<Gupri>{id("ex:x")});
  EXPECT_EQ(t.interop_level(id("ex:apple"), id("ex:car")).level, Interop::None);
}

TEST(Closure, VenusIsReferentialNotOntological) {
  auto t = venus();
  EXPECT_EQ(t.interop_level(id("ex:MorningStar"), id("ex:EveningStar")).level, Interop::Referential);
  EXPECT_EQ(as_set(t.equivalence_class(id("ex:MorningStar"), ClassLevel::Referential)),
            (std::set<Gupri>{id("ex:MorningStar"), id("ex:EveningStar"), id("ex:Venus")}));
  EXPECT_EQ(t.equivalence_class(id("ex:MorningStar"), ClassLevel::Ontological), std::vector<Gupri>{id("ex:MorningStar")});
}

TEST(Interop, PaperExamples) {
  Terminology t;
  t.add_mapping(fx::mapping("pato:weight", MappingPredicate::SameAs, "ncit:weight"));
  t.add_mapping(fx::mapping("UBERON:0000468", MappingPredicate::EquivalentClass, "CARO:0000012"));
  EXPECT_EQ(t.interop_level(id("ex:a"), id("ex:a")).level, Interop::Identical);
  EXPECT_EQ(t.interop_level(id("pato:weight"), id("ncit:weight")).level, Interop::Ontological);
  EXPECT_EQ(t.interop_level(id("UBERON:0000468"), id("CARO:0000012")).level, Interop::Referential);
}

TEST(Interop, HierarchyIsLiftedThroughReferentialClasses) {
  Terminology t;
  t.add_mapping(fx::mapping("ex:dog", MappingPredicate::SubClassOf, "ex:mammal"));
  t.add_mapping(fx::mapping("ex:mammal", MappingPredicate::EquivalentClass, "ex:mammalia"));
  t.add_mapping(fx::mapping("ex:mammalia", MappingPredicate::SubClassOf, "ex:animal"));
  auto up = t.interop_level(id("ex:dog"), id("ex:animal"));
  EXPECT_EQ(up.level, Interop::Hierarchical);
  EXPECT_EQ(up.direction, Direction::Broader);
  EXPECT_TRUE(up.actionable);
  EXPECT_EQ(t.interop_level(id("ex:animal"), id("ex:dog")).direction, Direction::Narrower);
  t.add_mapping(fx::mapping("ex:dog", MappingPredicate::CloseMatch, "ex:wolf"));
  auto assoc = t.interop_level(id("ex:wolf"), id("ex:dog"));
  EXPECT_EQ(assoc.level, Interop::Associative);
  EXPECT_FALSE(assoc.actionable);
}

TEST(Interop, MinConfidenceDropsWeakEdges) {
  Terminology t;
  t.add_mapping(fx::mapping("ex:a", MappingPredicate::SameAs, "ex:b", 0.4));
  EXPECT_EQ(t.interop_level(id("ex:a"), id("ex:b")).level, Interop::Ontological);
  EXPECT_EQ(t.interop_level(id("ex:a"), id("ex:b"), 0.5).level, Interop::None);
}

TEST(Interop, RemovingMappingInvalidatesSnapshot) {
  Terminology t;
  auto mid = t.add_mapping(fx::mapping("ex:a", MappingPredicate::SameAs, "ex:b"));
  EXPECT_EQ(t.interop_level(id("ex:a"), id("ex:b")).level, Interop::Ontological);
  t.remove_mapping(mid);
  EXPECT_EQ(t.interop_level(id("ex:a"), id("ex:b")).level, Interop::None);
}

TEST(ExplainPath, DirectAndTwoHop) {
  Terminology t;
  t.add_mapping(fx::mapping("ex:a", MappingPredicate::SameAs, "ex:b"));
  t.add_mapping(fx::mapping("ex:b", MappingPredicate::SameAs, "ex:c"));
  auto one = t.explain_path(id("ex:a"), id("ex:b"));
  ASSERT_EQ(one.size(), 1u);
  auto two = t.explain_path(id("ex:a"), id("ex:c"));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].object, id("ex:b"));
  EXPECT_EQ(two[1].subject, id("ex:b"));
  EXPECT_TRUE(t.explain_path(id("ex:a"), id("ex:zzz")).empty());
  EXPECT_TRUE(t.explain_path(id("ex:a"), id("ex:a")).empty());
}

TEST(ExplainPath, TiesBreakOnSmallestIntermediate) {
  Terminology t;
  for (const char* mid : {"ex:m2", "ex:m1"}) {
    t.add_mapping(fx::mapping("ex:a", MappingPredicate::SameAs, mid));
    t.add_mapping(fx::mapping(mid, MappingPredicate::SameAs, "ex:z"));
  }
  auto path = t.explain_path(id("ex:a"), id("ex:z"));
  ASSERT_EQ(path.size(), 2u);
  EXPECT_EQ(path[0].object, id("ex:m1"));
}

TEST(Audit, TermFairness) {
  Terminology t;
  t.register_term(fx::full_term("ex:good", "good"));
  TermRecord bare;
  bare.id = id("ex:bare");
  bare.labels = {{"en", "bare"}};
  t.register_term(bare);
  auto good = t.audit_term_fairness(id("ex:good"));
  for (const char* c : {"has_definition", "has_recognition_criteria", "has_multilingual_labels", "has_synonyms"})
    EXPECT_TRUE(good.passes(c)) << c;
  auto poor = t.audit_term_fairness(id("ex:bare"));
  EXPECT_FALSE(poor.passes("has_definition"));
  EXPECT_FALSE(poor.passes("has_multilingual_labels"));
  EXPECT_TRUE(poor.find("is_mapped")->advisory);
  try {
    t.audit_term_fairness(id("ex:missing"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownTerm);
  }
}

TEST(Audit, RecognitionCriteriaApplicability) {
  Terminology t;
  TermRecord r = fx::full_term("ex:abstract", "abstract");
  r.recognition_criteria.reset();
  r.recognition_criteria_applicable = false;
  t.register_term(r);
  EXPECT_EQ(t.audit_term_fairness(id("ex:abstract")).find("has_recognition_criteria")->status,
            CheckStatus::NotApplicable);
}

// Random mapping sets against the Floyd-Warshall oracle.
TEST(ClosureProperty, MatchesReachabilityOracle) {
  std::mt19937 rng(20240101);
  for (int round = 0; round < 500; ++round) {
    auto edges = fx::random_mappings(rng, 20, 40);
    int n = 0;
    for (const auto& e : edges)
      for (const auto* g : {&e.subject, &e.object})
        n = std::max(n, std::stoi(g->str().substr(g->str().rfind('t') + 1)) + 1);
    n = std::max(n, 2);
    Terminology t;
    for (const auto& e : edges) t.add_mapping(e);
    Oracle o(n, edges);
    for (int a = 0; a < n; ++a) {
      auto ont = as_set(t.equivalence_class(fx::term_n(a), ClassLevel::Ontological));
      auto ref = as_set(t.equivalence_class(fx::term_n(a), ClassLevel::Referential));
      std::set<Gupri> ont_o, ref_o;
      for (int b = 0; b < n; ++b) {
        if (o.ont[a][b]) ont_o.insert(fx::term_n(b));
        if (o.ref[a][b]) ref_o.insert(fx::term_n(b));
      }
      ASSERT_EQ(ont, ont_o) << "round " << round;
      ASSERT_EQ(ref, ref_o) << "round " << round;
      ASSERT_TRUE(std::includes(ref.begin(), ref.end(), ont.begin(), ont.end()));
      for (int b = 0; b < n; ++b) {
        auto v = t.interop_level(fx::term_n(a), fx::term_n(b));
        ASSERT_EQ(v.level, o.level(a, b)) << "round " << round << " pair " << a << "," << b;
      }
    }
  }
}

TEST(ClosureProperty, SymmetricEdgesGiveSymmetricVerdicts) {
  std::mt19937 rng(7);
  for (int round = 0; round < 200; ++round) {
    auto edges = fx::random_mappings(rng, 12, 20);
    Terminology t;
    for (const auto& e : edges) t.add_mapping(e);
    for (const auto& e : edges) {
      if (!traits(e.predicate).symmetric) continue;
      auto ab = t.interop_level(e.subject, e.object), ba = t.interop_level(e.object, e.subject);
      ASSERT_EQ(ab.level, ba.level);
    }
  }
}

TEST(ClosureProperty, NonActionableEdgesNeverChangeEquivalenceVerdicts) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> node(0, 9), kind(0, 2);
  const MappingPredicate noise[] = {MappingPredicate::CloseMatch, MappingPredicate::RelatedMatch,
                                    MappingPredicate::BroadMatch};
  for (int round = 0; round < 200; ++round) {
    auto edges = fx::random_mappings(rng, 10, 15);
    Terminology base;
    for (const auto& e : edges) base.add_mapping(e);
    Terminology noisy = base;
    for (int i = 0; i < 10; ++i) {
      auto m = fx::mapping("ex:t0", noise[kind(rng)], "ex:t1");
      m.subject = fx::term_n(node(rng));
      m.object = fx::term_n(node(rng));
      noisy.add_mapping(m);
    }
    for (int a = 0; a < 10; ++a)
      for (int b = 0; b < 10; ++b) {
        auto before = base.interop_level(fx::term_n(a), fx::term_n(b)).level;
        auto after = noisy.interop_level(fx::term_n(a), fx::term_n(b)).level;
        if (before >= Interop::Referential || after >= Interop::Referential) {
          ASSERT_EQ(before, after);
        }
      }
  }
}

TEST(ClosureProperty, Deterministic) {
  std::mt19937 rng(3);
  auto edges = fx::random_mappings(rng, 20, 40);
  Terminology a, b;
  for (const auto& e : edges) a.add_mapping(e);
  for (auto it = edges.rbegin(); it != edges.rend(); ++it) b.add_mapping(*it);
  auto pm = fx::prefixes();
  EXPECT_EQ(a.compute_closure().to_json(pm).dump(), b.compute_closure().to_json(pm).dump());
  EXPECT_EQ(a.compute_closure().to_json(pm).dump(), a.compute_closure().to_json(pm).dump());
}

// Breadth-first oracle over the edge families allowed for each verdict.
TEST(ExplainPathProperty, ShortestWitnessPath) {
  std::mt19937 rng(99);
  for (int round = 0; round < 300; ++round) {
    auto edges = fx::random_mappings(rng, 8, 12);
    Terminology t;
    for (const auto& e : edges) t.add_mapping(e);
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        Gupri ga = fx::term_n(a), gb = fx::term_n(b);
        auto v = t.interop_level(ga, gb);
        auto path = t.explain_path(ga, gb);
        if (v.level == Interop::None || v.level == Interop::Identical) {
          ASSERT_TRUE(path.empty());
          continue;
        }
        ASSERT_FALSE(path.empty()) << round << ":" << a << "," << b;
        if (!v.actionable) {
          ASSERT_EQ(path.size(), 1u);
          continue;
        }
        auto allowed = [&](const EntityMapping& e, const Gupri& from, Gupri& to) {
          auto fam = traits(e.predicate).family;
          bool equiv = fam == PredicateFamily::Ontological ||
                       (fam == PredicateFamily::Referential && v.level <= Interop::Referential);
          if (equiv && (e.subject == from || e.object == from)) {
            to = e.subject == from ? e.object : e.subject;
            return true;
          }
          if (v.level == Interop::Hierarchical &&
              (fam == PredicateFamily::SubClass || fam == PredicateFamily::SubProperty)) {
            bool up = v.direction == Direction::Broader;
            if ((up ? e.subject : e.object) == from) {
              to = up ? e.object : e.subject;
              return true;
            }
          }
          return false;
        };
        Gupri cur = ga;
        for (const auto& e : path) {
          Gupri next;
          ASSERT_TRUE(allowed(e, cur, next));
          cur = next;
        }
        ASSERT_EQ(cur, gb);
        std::map<Gupri, int> dist{{ga, 0}};
        std::deque<Gupri> q{ga};
        while (!q.empty()) {
          Gupri u = q.front();
          q.pop_front();
          for (const auto& [mid, e] : t.mappings()) {
            Gupri w;
            if (allowed(e, u, w) && !dist.count(w)) {
              dist[w] = dist[u] + 1;
              q.push_back(w);
            }
          }
        }
        ASSERT_EQ(static_cast<int>(path.size()), dist.at(gb));
      }
  }
}
