#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace interlex {

// Error codes shared by every registry. The tag() spelling is the
// machine-readable form used by the CLI and the HTTP facade.
enum class Errc {
  InvalidGupri,
  InvalidTermRecord,
  ConflictingTermRecord,
  UnknownTerm,
  UnknownPredicate,
  UnknownMapping,
  MissingRequiredColumn,
  MalformedRow,
  DuplicateSlotId,
  NoRequiredSlot,
  InvalidSchema,
  ConflictingSchema,
  UnknownSchema,
  InvalidInstance,
  InvalidAlignment,
  IncompatibleAlignment,
  UncoveredRequiredTargetSlot,
  ConflictingCrosswalk,
  UnknownCrosswalk,
  InvalidCrosswalk,
  SchemaMismatch,
  JoinProducesUncoveredRequiredSlot,
  NotInvertible,
  SourceInvalid,
  UnfillableRequiredTargetSlot,
  NoMappedTerm,
  ReferentialDisallowed,
  TargetInvalid,
  HubNotInSet,
  InvalidDescriptor,
  ConflictingDescriptor,
  UnknownOperation,
  UnknownUnit,
  NonDecimalValue,
  MalformedContent,
  ConflictingFdo,
  UnknownFdo,
  EmptyQuery,
  IoFailure,
  ParseFailure,
  BindFailure,
};

constexpr std::string_view errc_tag(Errc c) noexcept {
  switch (c) {
    case Errc::InvalidGupri: return "InvalidGupri";
    case Errc::InvalidTermRecord: return "InvalidTermRecord";
    case Errc::ConflictingTermRecord: return "ConflictingTermRecord";
    case Errc::UnknownTerm: return "UnknownTerm";
    case Errc::UnknownPredicate: return "UnknownPredicate";
    case Errc::UnknownMapping: return "UnknownMapping";
    case Errc::MissingRequiredColumn: return "MissingRequiredColumn";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateSlotId: return "DuplicateSlotId";
    case Errc::NoRequiredSlot: return "NoRequiredSlot";
    case Errc::InvalidSchema: return "InvalidSchema";
    case Errc::ConflictingSchema: return "ConflictingSchema";
    case Errc::UnknownSchema: return "UnknownSchema";
    case Errc::InvalidInstance: return "InvalidInstance";
    case Errc::InvalidAlignment: return "InvalidAlignment";
    case Errc::IncompatibleAlignment: return "IncompatibleAlignment";
    case Errc::UncoveredRequiredTargetSlot: return "UncoveredRequiredTargetSlot";
    case Errc::ConflictingCrosswalk: return "ConflictingCrosswalk";
    case Errc::UnknownCrosswalk: return "UnknownCrosswalk";
    case Errc::InvalidCrosswalk: return "InvalidCrosswalk";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::JoinProducesUncoveredRequiredSlot: return "JoinProducesUncoveredRequiredSlot";
    case Errc::NotInvertible: return "NotInvertible";
    case Errc::SourceInvalid: return "SourceInvalid";
    case Errc::UnfillableRequiredTargetSlot: return "UnfillableRequiredTargetSlot";
    case Errc::NoMappedTerm: return "NoMappedTerm";
    case Errc::ReferentialDisallowed: return "ReferentialDisallowed";
    case Errc::TargetInvalid: return "TargetInvalid";
    case Errc::HubNotInSet: return "HubNotInSet";
    case Errc::InvalidDescriptor: return "InvalidDescriptor";
    case Errc::ConflictingDescriptor: return "ConflictingDescriptor";
    case Errc::UnknownOperation: return "UnknownOperation";
    case Errc::UnknownUnit: return "UnknownUnit";
    case Errc::NonDecimalValue: return "NonDecimalValue";
    case Errc::MalformedContent: return "MalformedContent";
    case Errc::ConflictingFdo: return "ConflictingFdo";
    case Errc::UnknownFdo: return "UnknownFdo";
    case Errc::EmptyQuery: return "EmptyQuery";
    case Errc::IoFailure: return "IoFailure";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::BindFailure: return "BindFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_tag(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view tag() const noexcept { return errc_tag(code_); }

 private:
  Errc code_;
};

// Raised while reading store files; carries the offending file and 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& reason)
      : Error(Errc::ParseFailure, file + ":" + std::to_string(line) + ": " + reason),
        file_(std::move(file)),
        line_(line),
        reason_(reason) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string reason_;
};

// 64-bit FNV-1a. Used to mint stable identifiers; std::hash is not stable
// across standard library implementations.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace interlex
