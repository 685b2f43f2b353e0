#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "interlex/error.hpp"

namespace interlex {

// A globally unique persistent resolvable identifier, always held in its
// canonical absolute form. Construct through PrefixMap::canonicalize or
// Gupri::absolute; a default-constructed Gupri is empty and never valid
// inside a registry.
class Gupri {
 public:
  Gupri() = default;

  static Gupri absolute(std::string_view iri) {
    if (!looks_absolute(iri)) {
      throw Error(Errc::InvalidGupri, "not an absolute IRI: '" + std::string(iri) + "'");
    }
    return Gupri(std::string(iri));
  }

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend bool operator==(const Gupri&, const Gupri&) = default;
  friend auto operator<=>(const Gupri&, const Gupri&) = default;

  static bool has_forbidden_chars(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) {
      return std::isspace(c) || c < 0x20 || c == '<' || c == '>' || c == '"';
    });
  }

  static bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
      return std::isalnum(c) || c == '+' || c == '.' || c == '-';
    });
  }

  // "scheme://..." or "urn:..." with no whitespace.
  static bool looks_absolute(std::string_view s) {
    if (s.empty() || has_forbidden_chars(s)) return false;
    auto sep = s.find("://");
    if (sep != std::string_view::npos) {
      return valid_scheme(s.substr(0, sep)) && sep + 3 < s.size();
    }
    if (s.size() > 4 && (s.substr(0, 4) == "urn:" || s.substr(0, 4) == "URN:")) return true;
    return false;
  }

 private:
  explicit Gupri(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

// Explicit prefix -> IRI base configuration. No network resolution.
class PrefixMap {
 public:
  PrefixMap() = default;

  static bool valid_prefix_name(std::string_view p) {
    if (p.empty()) return false;
    unsigned char first = static_cast<unsigned char>(p.front());
    if (!(std::isalpha(first) || first == '_')) return false;
    return std::all_of(p.begin(), p.end(), [](unsigned char c) {
      return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
  }

  void add(std::string prefix, std::string base) {
    if (!valid_prefix_name(prefix)) {
      throw Error(Errc::InvalidGupri, "invalid prefix name '" + prefix + "'");
    }
    if (!Gupri::looks_absolute(base)) {
      throw Error(Errc::InvalidGupri, "prefix '" + prefix + "' must expand to an absolute IRI");
    }
    prefixes_[std::move(prefix)] = std::move(base);
  }

  bool contains(std::string_view prefix) const { return prefixes_.count(std::string(prefix)) > 0; }
  const std::map<std::string, std::string>& entries() const noexcept { return prefixes_; }

  // Absolute IRIs pass through unchanged; CURIEs need a registered prefix.
  // canonicalize(canonicalize(x).str()) == canonicalize(x).
  Gupri canonicalize(std::string_view text) const {
    if (text.empty()) throw Error(Errc::InvalidGupri, "empty identifier");
    if (Gupri::has_forbidden_chars(text)) {
      throw Error(Errc::InvalidGupri, "identifier contains whitespace or reserved characters: '" +
                                          std::string(text) + "'");
    }
    if (text.find("://") != std::string_view::npos) return Gupri::absolute(text);
    auto colon = text.find(':');
    if (colon != std::string_view::npos) {
      auto it = prefixes_.find(std::string(text.substr(0, colon)));
      if (it != prefixes_.end()) {
        return Gupri::absolute(it->second + std::string(text.substr(colon + 1)));
      }
      if (Gupri::looks_absolute(text)) return Gupri::absolute(text);
      throw Error(Errc::InvalidGupri,
                  "unregistered prefix '" + std::string(text.substr(0, colon)) + "' in '" + std::string(text) + "'");
    }
    throw Error(Errc::InvalidGupri, "neither a CURIE nor an absolute IRI: '" + std::string(text) + "'");
  }

  std::optional<Gupri> try_canonicalize(std::string_view text) const {
    try {
      return canonicalize(text);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  // Longest matching base wins; ties go to the smaller prefix name. Falls back
  // to the absolute form whenever the compact form would not round-trip.
  std::string compact(const Gupri& g) const {
    const std::string& iri = g.str();
    const std::string* best_prefix = nullptr;
    std::size_t best_len = 0;
    for (const auto& [prefix, base] : prefixes_) {
      if (base.size() >= iri.size() || iri.compare(0, base.size(), base) != 0) continue;
      if (base.size() > best_len) {
        best_len = base.size();
        best_prefix = &prefix;
      }
    }
    if (best_prefix == nullptr) return iri;
    std::string local = iri.substr(best_len);
    if (local.rfind("//", 0) == 0) return iri;
    std::string curie = *best_prefix + ":" + local;
    if (curie.find("://") != std::string::npos) return iri;
    return curie;
  }

  // Line format: prefix<TAB>iri. Blank lines and '#' comments are ignored.
  static PrefixMap parse(std::string_view text, const std::string& file_name = "prefixes") {
    PrefixMap pm;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError(file_name, line_no, "expected prefix<TAB>iri");
      try {
        pm.add(line.substr(0, tab), line.substr(tab + 1));
      } catch (const Error& e) {
        throw ParseError(file_name, line_no, e.what());
      }
    }
    return pm;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& [prefix, base] : prefixes_) out += prefix + "\t" + base + "\n";
    return out;
  }

  // W3C vocabularies plus the OBO PURL pattern used by most life-science ontologies.
  static PrefixMap standard() {
    PrefixMap pm;
    pm.add("owl", "http://www.w3.org/2002/07/owl#");
    pm.add("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#");
    pm.add("rdfs", "http://www.w3.org/2000/01/rdf-schema#");
    pm.add("skos", "http://www.w3.org/2004/02/skos/core#");
    pm.add("xsd", "http://www.w3.org/2001/XMLSchema#");
    return pm;
  }

 private:
  std::map<std::string, std::string> prefixes_;
};

}  // namespace interlex
