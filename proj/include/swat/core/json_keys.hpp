#pragma once

#include <set>
#include <string>

#include "swat/core/error.hpp"
#include "swat/core/json_io.hpp"

namespace swat {

// Config-block helpers; `where` is the dotted key path used in messages
// (empty at the top level).
inline std::string key_path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("'" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument("unknown config key '" + key_path(where, key) + "'");
  }
}

template <typename T>
void read_key(const Json& j, const char* key, T& field, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument("config key '" + key_path(where, key) + "' has the wrong type");
  }
}

}  // namespace swat
