#pragma once

// Plain-text persistent store.
//
// Layout under the root directory:
//   prefixes        prefix<TAB>iri per line
//   terms           one JSON term record per line
//   mappings.tsv    SSSOM-style mapping table
//   schemas/        one JSON document per schema
//   crosswalks/     one JSON document per crosswalk
//   operations/     one JSON document per operation descriptor
//   fdos/           one JSON document per FAIR Digital Object
//
// Export is canonical: records sorted by canonical id, JSON objects with keys
// in lexicographic order, identifiers compacted through the prefix map.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "interlex/crosswalks.hpp"
#include "interlex/error.hpp"
#include "interlex/fdo.hpp"
#include "interlex/gupri.hpp"
#include "interlex/json_util.hpp"
#include "interlex/operations.hpp"
#include "interlex/schemas.hpp"
#include "interlex/terminology.hpp"

namespace interlex {

struct Store {
  PrefixMap prefixes = PrefixMap::standard();
  Terminology terms;
  SchemaRegistry schemas;
  CrosswalkRegistry crosswalks;
  OperationRegistry operations;
  FdoRegistry fdos;

  Gupri id(std::string_view text) const { return prefixes.canonicalize(text); }
  std::string compact(const Gupri& g) const { return prefixes.compact(g); }
};

namespace fs = std::filesystem;

inline const char* const kStoreDirs[] = {"schemas", "crosswalks", "operations", "fdos"};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + p.string());
  out << content;
  if (!out) throw Error(Errc::IoFailure, "short write to " + p.string());
}

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Parses a JSON document, turning syntax errors into ParseError(file, line).
inline json parse_json_document(std::string_view text, const std::string& file) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(file, line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
}

// One record of a JSON-lines file; errors carry the record's line.
inline json parse_json_line(std::string_view text, const std::string& file, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(file, line, e.what());
  }
}

inline json read_json_file(const fs::path& p, const std::string& display_name) {
  return parse_json_document(read_file(p), display_name);
}

inline void init_store(const fs::path& root) {
  std::error_code ec;
  if (fs::exists(root / "prefixes", ec)) throw Error(Errc::IoFailure, "store already exists at " + root.string());
  fs::create_directories(root, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + root.string() + ": " + ec.message());
  for (const char* d : kStoreDirs) {
    fs::create_directories(root / d, ec);
    if (ec) throw Error(Errc::IoFailure, "cannot create " + (root / d).string() + ": " + ec.message());
  }
  Store empty;
  write_file(root / "prefixes", empty.prefixes.serialize());
  write_file(root / "terms", "");
  write_file(root / "mappings.tsv", empty.terms.export_mappings_tsv(empty.prefixes));
}

namespace detail {

inline std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Fn>
void with_file_context(const std::string& file, std::size_t line, Fn&& fn) {
  try {
    fn();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(file, line, e.what());
  }
}

inline std::string file_stem_for(const std::string& compact_id) {
  std::string s;
  for (char c : compact_id) {
    bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    s += keep ? c : '_';
  }
  while (!s.empty() && s.front() == '.') s.erase(s.begin());
  return s.empty() ? "_" : s;
}

}  // namespace detail

// Parse failures name the file (relative to the root) and the line.
inline Store load_store(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(Errc::IoFailure, "no store at " + root.string());
  Store store;
  if (fs::exists(root / "prefixes")) store.prefixes = PrefixMap::parse(read_file(root / "prefixes"), "prefixes");

  if (fs::exists(root / "terms")) {
    std::istringstream in(read_file(root / "terms"));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      detail::with_file_context("terms", line_no, [&] {
        store.terms.register_term(term_from_json(parse_json_line(line, "terms", line_no), store.prefixes));
      });
    }
  }

  if (fs::exists(root / "mappings.tsv")) {
    std::string text = read_file(root / "mappings.tsv");
    ImportReport report;
    detail::with_file_context("mappings.tsv", 1,
                              [&] { report = store.terms.import_mappings_tsv(text, store.prefixes); });
    if (!report.rejected.empty()) {
      throw ParseError("mappings.tsv", report.rejected.front().line, report.rejected.front().reason);
    }
  }

  auto load_dir = [&](const char* dir, auto&& register_doc) {
    for (const auto& p : detail::json_files(root / dir)) {
      std::string name = std::string(dir) + "/" + p.filename().string();
      json doc = read_json_file(p, name);
      detail::with_file_context(name, 1, [&] { register_doc(doc); });
    }
  };
  load_dir("schemas", [&](const json& j) { store.schemas.register_schema(schema_from_json(j, store.prefixes)); });
  load_dir("crosswalks", [&](const json& j) {
    store.crosswalks.restore(store.schemas, store.terms, crosswalk_from_json(j, store.prefixes));
  });
  load_dir("operations", [&](const json& j) {
    store.operations.register_operation(store.schemas, operation_from_json(j, store.prefixes));
  });
  load_dir("fdos", [&](const json& j) { store.fdos.register_fdo(fdo_from_json(j, store.prefixes)); });
  return store;
}

inline std::string render_document(const json& j) { return j.dump(2) + "\n"; }

inline void export_store(const Store& store, const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + root.string() + ": " + ec.message());
  write_file(root / "prefixes", store.prefixes.serialize());

  std::string terms;
  for (const auto& [id, t] : store.terms.terms()) terms += to_json(t, store.prefixes).dump() + "\n";
  write_file(root / "terms", terms);
  write_file(root / "mappings.tsv", store.terms.export_mappings_tsv(store.prefixes));

  auto write_dir = [&](const char* dir, const auto& records, auto&& render) {
    fs::path d = root / dir;
    fs::create_directories(d, ec);
    if (ec) throw Error(Errc::IoFailure, "cannot create " + d.string() + ": " + ec.message());
    std::set<std::string> written;
    for (const auto& [id, rec] : records) {
      std::string stem = detail::file_stem_for(store.prefixes.compact(id));
      if (written.count(stem + ".json")) stem += "-" + hex64(fnv1a64(id.str())).substr(0, 8);
      written.insert(stem + ".json");
      write_file(d / (stem + ".json"), render_document(render(rec)));
    }
    for (const auto& p : detail::json_files(d)) {
      if (!written.count(p.filename().string())) fs::remove(p, ec);
    }
  };
  write_dir("schemas", store.schemas.schemas(), [&](const auto& s) { return to_json(s, store.prefixes); });
  write_dir("crosswalks", store.crosswalks.crosswalks(), [&](const auto& c) { return to_json(c, store.prefixes); });
  write_dir("operations", store.operations.operations(), [&](const auto& o) { return to_json(o, store.prefixes); });
  write_dir("fdos", store.fdos.records(), [&](const auto& r) { return to_json(r, store.prefixes); });
}

enum class Expand { None, Ontological, Referential };

inline std::optional<Expand> parse_expand(std::string_view s) {
  if (s == "none") return Expand::None;
  if (s == "ontological") return Expand::Ontological;
  if (s == "referential") return Expand::Referential;
  return std::nullopt;
}

struct FindQuery {
  std::optional<Gupri> term;
  Expand expand = Expand::None;
  std::optional<Gupri> statement_type;
  std::optional<StatementCategory> category;
};

// FDOs matching every given criterion, ordered by gupri.
inline std::vector<Gupri> find(const Store& store, const FindQuery& q) {
  if (!q.term && !q.statement_type && !q.category) throw Error(Errc::EmptyQuery, "no search criterion given");
  std::set<Gupri> wanted_terms;
  if (q.term) {
    wanted_terms.insert(*q.term);
    if (q.expand != Expand::None) {
      auto cls = store.terms.equivalence_class(
          *q.term, q.expand == Expand::Ontological ? ClassLevel::Ontological : ClassLevel::Referential);
      wanted_terms.insert(cls.begin(), cls.end());
    }
  }
  std::set<Gupri> wanted_schemas;
  if (q.statement_type) {
    auto s = store.schemas.schemas_for_statement_type(store.terms, *q.statement_type);
    wanted_schemas.insert(s.begin(), s.end());
  }
  std::vector<Gupri> out;
  for (const auto& [id, r] : store.fdos.records()) {
    if (q.category && r.category != q.category) continue;
    if (q.term) {
      auto mentioned = r.mentioned();
      if (std::none_of(mentioned.begin(), mentioned.end(), [&](const Gupri& g) { return wanted_terms.count(g) > 0; }))
        continue;
    }
    if (q.statement_type) {
      auto insts = r.instances();
      if (std::none_of(insts.begin(), insts.end(),
                       [&](const StatementInstance* i) { return wanted_schemas.count(i->schema_id) > 0; }))
        continue;
    }
    out.push_back(id);
  }
  return out;
}

}  // namespace interlex
