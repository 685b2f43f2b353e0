#pragma once

#include <mutex>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "interlex/error.hpp"

namespace interlex {

using json = nlohmann::json;

namespace jsonu {

inline const json& require(const json& obj, const char* key, Errc code, const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(code, ctx + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

inline std::string req_string(const json& obj, const char* key, Errc code, const std::string& ctx) {
  const json& v = require(obj, key, code, ctx);
  if (!v.is_string()) throw Error(code, ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::optional<std::string> opt_string(const json& obj, const char* key, Errc code, const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  if (!obj.at(key).is_string()) throw Error(code, ctx + ": field '" + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

inline json parse(std::string_view text, Errc code, const std::string& ctx) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(code, ctx + ": " + e.what());
  }
}

}  // namespace jsonu

// Copyable lazily-computed immutable snapshot. Readers share the cached
// value; reset() drops it so the next get() recomputes.
template <typename T>
class LazySnapshot {
 public:
  LazySnapshot() = default;
  LazySnapshot(const LazySnapshot& other) : value_(other.load()) {}
  LazySnapshot& operator=(const LazySnapshot& other) {
    if (this != &other) {
      auto v = other.load();
      std::lock_guard lock(mutex_);
      value_ = std::move(v);
    }
    return *this;
  }

  template <typename Factory>
  std::shared_ptr<const T> get(Factory&& make) const {
    std::lock_guard lock(mutex_);
    if (!value_) value_ = std::make_shared<const T>(make());
    return value_;
  }

  void reset() {
    std::lock_guard lock(mutex_);
    value_.reset();
  }

 private:
  std::shared_ptr<const T> load() const {
    std::lock_guard lock(mutex_);
    return value_;
  }

  mutable std::mutex mutex_;
  mutable std::shared_ptr<const T> value_;
};

}  // namespace interlex
