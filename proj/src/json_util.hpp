#pragma once

// Field-checked accessors over nlohmann::json used by every document reader.

#include <string>

#include <json.hpp>

#include "vlcalloc/error.hpp"
#include "vlcalloc/vec3.hpp"

namespace vlcalloc::detail {

using nlohmann::json;

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw Error("field '" + path + "': expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw Error("field '" + path + "." + key + "': missing");
    return *it;
}

inline double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw Error("field '" + path + "': expected a number");
    return v.get<double>();
}

inline double number(const json& obj, const std::string& key, const std::string& path) {
    return number(field(obj, key, path), path + "." + key);
}

inline double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    return number(obj.at(key), path + "." + key);
}

inline long integer(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_number_integer()) throw Error("field '" + path + "." + key + "': expected an integer");
    return v.get<long>();
}

inline std::string text(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_string()) throw Error("field '" + path + "." + key + "': expected a string");
    return v.get<std::string>();
}

inline const json& array(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_array()) throw Error("field '" + path + "." + key + "': expected an array");
    return v;
}

inline Vec3 vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw Error("field '" + path + "': expected an array of 3 numbers");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
}

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline json parse_document(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(what + ": " + e.what());
    }
}

}  // namespace vlcalloc::detail
