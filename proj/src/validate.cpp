#include "restex/validate.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

namespace restex {

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) n += (c & 0xC0) != 0x80;
  return n;
}

std::shared_ptr<const std::regex> cached_regex(const std::string& pattern) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const std::regex>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(pattern);
  if (it != cache.end()) return it->second;
  auto re = std::make_shared<const std::regex>(pattern, std::regex::ECMAScript);
  cache.emplace(pattern, re);
  return re;
}

bool pattern_matches(const std::string& pattern, const std::string& text) {
  return std::regex_search(text, *cached_regex(pattern));
}

bool format_matches(std::string_view format, const std::string& text) {
  static const std::map<std::string_view, std::string> patterns = {
      {"date-time",
       R"(^\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])[Tt]([01]\d|2[0-3]):[0-5]\d:([0-5]\d|60)(\.\d+)?([Zz]|[+-]([01]\d|2[0-3]):[0-5]\d)$)"},
      {"date", R"(^\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])$)"},
      {"uuid", R"(^[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}$)"},
      {"email", R"(^[^@\s]+@[^@\s]+\.[^@\s]+$)"},
  };
  auto it = patterns.find(format);
  return it == patterns.end() || pattern_matches(it->second, text);
}

namespace {

std::string kind_name(const json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

bool is_integral(const json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) return true;
  if (!v.is_number_float()) return false;
  double d = v.get<double>();
  return std::isfinite(d) && std::floor(d) == d;
}

bool type_ok(const json& v, SchemaKind kind) {
  switch (kind) {
    case SchemaKind::Any: return true;
    case SchemaKind::Object: return v.is_object();
    case SchemaKind::Array: return v.is_array();
    case SchemaKind::String: return v.is_string();
    case SchemaKind::Integer: return is_integral(v);
    case SchemaKind::Number: return v.is_number();
    case SchemaKind::Boolean: return v.is_boolean();
  }
  return true;
}

std::string fmt_number(double d) {
  json j = d;
  if (std::floor(d) == d && std::fabs(d) < 1e15) j = static_cast<std::int64_t>(d);
  return j.dump();
}

void check(const json& v, const SchemaNode& s, const std::string& path, std::vector<Violation>& out) {
  if (v.is_null()) {
    if (s.nullable || s.kind == SchemaKind::Any) return;
    out.push_back({path, "null", "null is not allowed"});
    return;
  }
  if (!type_ok(v, s.kind)) {
    out.push_back({path, "type", "expected " + std::string(to_string(s.kind)) + ", got " + kind_name(v)});
    return;
  }
  if (!s.enum_values.empty()) {
    bool found = false;
    for (const auto& e : s.enum_values) found |= e == v;
    if (!found) out.push_back({path, "enum", v.dump() + " is not one of the allowed values"});
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (s.minimum) {
      if (s.exclusive_minimum ? !(d > *s.minimum) : !(d >= *s.minimum)) {
        out.push_back({path, s.exclusive_minimum ? "exclusiveMinimum" : "minimum",
                       v.dump() + " is below " + fmt_number(*s.minimum)});
      }
    }
    if (s.maximum) {
      if (s.exclusive_maximum ? !(d < *s.maximum) : !(d <= *s.maximum)) {
        out.push_back({path, s.exclusive_maximum ? "exclusiveMaximum" : "maximum",
                       v.dump() + " is above " + fmt_number(*s.maximum)});
      }
    }
  }
  if (v.is_string()) {
    const auto& text = v.get_ref<const std::string&>();
    const auto len = utf8_length(text);
    if (s.min_length && len < *s.min_length) {
      out.push_back({path, "minLength", "length " + std::to_string(len) + " < " + std::to_string(*s.min_length)});
    }
    if (s.max_length && len > *s.max_length) {
      out.push_back({path, "maxLength", "length " + std::to_string(len) + " > " + std::to_string(*s.max_length)});
    }
    if (s.pattern && !pattern_matches(*s.pattern, text)) {
      out.push_back({path, "pattern", "does not match " + *s.pattern});
    }
    if (s.format && !format_matches(*s.format, text)) {
      out.push_back({path, "format", "not a valid " + *s.format});
    }
  }
  if (v.is_array()) {
    if (s.min_items && v.size() < *s.min_items) {
      out.push_back({path, "minItems", std::to_string(v.size()) + " items < " + std::to_string(*s.min_items)});
    }
    if (s.max_items && v.size() > *s.max_items) {
      out.push_back({path, "maxItems", std::to_string(v.size()) + " items > " + std::to_string(*s.max_items)});
    }
    if (s.unique_items) {
      std::set<std::string> seen;
      for (const auto& item : v) {
        if (!seen.insert(item.dump()).second) {
          out.push_back({path, "uniqueItems", "duplicate item " + item.dump()});
          break;
        }
      }
    }
    if (s.items) {
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], *s.items, path + "[" + std::to_string(i) + "]", out);
    }
  }
  if (v.is_object()) {
    for (const auto& name : s.required) {
      if (!v.contains(name)) out.push_back({path + "." + name, "required", "required property is missing"});
    }
    for (const auto& [name, child] : s.properties) {
      auto it = v.find(name);
      if (it != v.end()) check(*it, *child, path + "." + name, out);
    }
  }
}

}  // namespace

std::vector<Violation> validate(const json& value, const SchemaNode& schema, const std::string& path) {
  std::vector<Violation> out;
  check(value, schema, path, out);
  return out;
}

std::optional<json> coerce_wire(std::string_view text, const SchemaNode& schema) {
  switch (schema.kind) {
    case SchemaKind::Integer: {
      std::int64_t n = 0;
      auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
      if (ec != std::errc() || end != text.data() + text.size() || text.empty()) return std::nullopt;
      return json(n);
    }
    case SchemaKind::Number: {
      if (text.empty()) return std::nullopt;
      try {
        std::size_t used = 0;
        const std::string s(text);
        double d = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(d)) return std::nullopt;
        return json(d);
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
    case SchemaKind::Boolean:
      if (text == "true") return json(true);
      if (text == "false") return json(false);
      return std::nullopt;
    case SchemaKind::Object:
    case SchemaKind::Array:
      try {
        return json::parse(text);
      } catch (const json::parse_error&) {
        return std::nullopt;
      }
    default:
      return json(std::string(text));
  }
}

std::vector<Violation> validate_wire(std::string_view text, const SchemaNode& schema, const std::string& path) {
  auto value = coerce_wire(text, schema);
  if (!value) {
    return {{path, "type", "'" + std::string(text) + "' is not a valid " + std::string(to_string(schema.kind))}};
  }
  // Enum values for non-string types compare after coercion; string enums
  // compare as text.
  return validate(*value, schema, path);
}

}  // namespace restex
