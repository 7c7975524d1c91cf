//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "molopt/cli.hpp"

namespace molopt::cli {

/// Strict reader over a JSON object: every key must be consumed before
/// done(), and values must have the exact JSON type of the target.
class Fields {
 public:
  Fields(const nlohmann::json& j, std::string path);

  /// nullptr when absent; marks the key as known either way.
  const nlohmann::json* raw(const char* key);

  template <class T>
  bool opt(const char* key, T& out) {
    const auto* v = raw(key);
    if (!v) return false;
    out = convert<T>(*v, where(key));
    return true;
  }

  template <class T>
  T req(const char* key) {
    const auto* v = raw(key);
    if (!v) throw ConfigError(where(key) + ": required");
    return convert<T>(*v, where(key));
  }

  void done() const;

 private:
  template <class T>
  static T convert(const nlohmann::json& v, const std::string& at) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(at + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError(at + ": expected a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(at + ": expected an integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(at + ": expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(at + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (is_optional<T>::value) {
      return convert<typename T::value_type>(v, at);
    } else {
      // Vectors.
      if (!v.is_array()) throw ConfigError(at + ": expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], at + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
  }

  template <class U>
  struct is_optional : std::false_type { };
  template <class U>
  struct is_optional<std::optional<U>> : std::true_type { };

  std::string where(const char* key) const;

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace molopt::cli
