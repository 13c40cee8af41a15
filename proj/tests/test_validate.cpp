#include <doctest.h>

#include <regex>

#include "restex/pattern_gen.hpp"
#include "restex/plan.hpp"
#include "restex/validate.hpp"

using namespace restex;

namespace {

SchemaPtr schema_of(const char* text) {
  // Wrap the schema in a minimal document and read it back through the loader.
  json doc = {{"openapi", "3.0.3"},
              {"info", {{"title", "t"}, {"version", "1"}}},
              {"paths", json::object()},
              {"components", {{"schemas", {{"S", json::parse(text)}}}}}};
  return load_spec(doc).schemas.at("S");
}

std::vector<std::string> constraints(const std::vector<Violation>& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.path + ":" + x.constraint);
  return out;
}

}  // namespace

TEST_CASE("null in a non-nullable string is reported at its path") {
  auto s = schema_of(R"({"type": "object", "required": ["metadata"], "properties": {
      "metadata": {"type": "object", "properties": {"creationTimestamp": {"type": "string", "format": "date-time"}}}}})");
  auto v = validate(json::parse(R"({"metadata": {"creationTimestamp": null}})"), *s);
  CHECK(constraints(v) == std::vector<std::string>{"$.metadata.creationTimestamp:null"});
  CHECK(validate(json::parse(R"({"metadata": {"creationTimestamp": "2024-01-02T03:04:05Z"}})"), *s).empty());
}

TEST_CASE("missing required field names the field") {
  auto s = schema_of(R"({"type": "object", "required": ["name", "id"], "properties": {"name": {"type": "string"}}})");
  auto v = validate(json::parse(R"({"id": "x"})"), *s);
  CHECK(constraints(v) == std::vector<std::string>{"$.name:required"});
}

TEST_CASE("scalar constraints") {
  auto s = schema_of(R"({"type": "integer", "minimum": 1, "maximum": 10})");
  CHECK(validate(1, *s).empty());
  CHECK(validate(10, *s).empty());
  CHECK(constraints(validate(0, *s)) == std::vector<std::string>{"$:minimum"});
  CHECK(constraints(validate(11, *s)) == std::vector<std::string>{"$:maximum"});
  CHECK(constraints(validate(2.5, *s)) == std::vector<std::string>{"$:type"});
  CHECK(validate(3.0, *s).empty());
  CHECK(constraints(validate("3", *s)) == std::vector<std::string>{"$:type"});

  auto ex = schema_of(R"({"type": "number", "minimum": 0, "exclusiveMinimum": true})");
  CHECK(constraints(validate(0, *ex)) == std::vector<std::string>{"$:exclusiveMinimum"});
  CHECK(validate(0.01, *ex).empty());

  auto str = schema_of(R"({"type": "string", "minLength": 2, "maxLength": 3, "pattern": "^[a-z]+$"})");
  CHECK(validate("ab", *str).empty());
  CHECK(constraints(validate("a", *str)) == std::vector<std::string>{"$:minLength"});
  CHECK(constraints(validate("abcd", *str)) == std::vector<std::string>{"$:maxLength"});
  CHECK(constraints(validate("A1", *str)) == std::vector<std::string>{"$:pattern"});

  auto en = schema_of(R"({"type": "string", "enum": ["paperback", "hardcover"]})");
  CHECK(validate("paperback", *en).empty());
  CHECK(constraints(validate("ebook", *en)) == std::vector<std::string>{"$:enum"});

  auto nul = schema_of(R"({"type": "string", "nullable": true})");
  CHECK(validate(nullptr, *nul).empty());
}

TEST_CASE("array constraints") {
  auto s = schema_of(R"({"type": "array", "minItems": 1, "maxItems": 2, "uniqueItems": true,
                          "items": {"type": "string"}})");
  CHECK(validate(json::array({"a"}), *s).empty());
  CHECK(constraints(validate(json::array(), *s)) == std::vector<std::string>{"$:minItems"});
  CHECK(constraints(validate(json::array({"a", "b", "c"}), *s)) == std::vector<std::string>{"$:maxItems"});
  CHECK(constraints(validate(json::array({"a", "a"}), *s)) == std::vector<std::string>{"$:uniqueItems"});
  CHECK(constraints(validate(json::array({"a", 1}), *s)) == std::vector<std::string>{"$[1]:type"});
}

TEST_CASE("wire values are coerced before validation") {
  auto s = schema_of(R"({"type": "integer", "minimum": 1, "maximum": 10})");
  CHECK(validate_wire("5", *s).empty());
  CHECK(constraints(validate_wire("abc", *s)) == std::vector<std::string>{"$:type"});
  CHECK(constraints(validate_wire("1.5", *s)) == std::vector<std::string>{"$:type"});
  CHECK(constraints(validate_wire("0", *s)) == std::vector<std::string>{"$:minimum"});
  auto b = schema_of(R"({"type": "boolean"})");
  CHECK(validate_wire("true", *b).empty());
  CHECK(!validate_wire("yes", *b).empty());
}

TEST_CASE("formats") {
  CHECK(format_matches("date-time", "2024-02-29T23:59:59Z"));
  CHECK(format_matches("date-time", "2024-02-29T23:59:59.123+02:00"));
  CHECK(!format_matches("date-time", "2024-02-29 23:59:59"));
  CHECK(format_matches("date", "2024-02-29"));
  CHECK(format_matches("uuid", "123e4567-e89b-12d3-a456-426614174000"));
  CHECK(format_matches("email", "a.b@example.com"));
  CHECK(!format_matches("email", "nope"));
  CHECK(format_matches("hostname", "anything at all"));
}

TEST_CASE("pattern generator output always matches the pattern") {
  const char* patterns[] = {
      "^[a-z][a-z0-9]{1,31}$",
      "^[a-z0-9._]{1,20}@[a-z]{2,10}\\.(com|org|net)$",
      "^\\d{3}-\\d{4}$",
      "^(ab|cd)+x?$",
      "^[^0-9]{2,4}$",
      "^[A-Z]\\w*$",
      "^(?:v\\d+\\.){2}\\d+$",
      "abc",
      "^a.c$",
  };
  Rng rng(7);
  for (const char* p : patterns) {
    auto gen = PatternGenerator::compile(p);
    REQUIRE_MESSAGE(gen, p);
    const std::regex re(p, std::regex::ECMAScript);
    for (int i = 0; i < 300; ++i) {
      auto s = gen->generate(rng);
      INFO(p << " -> " << s);
      CHECK(std::regex_search(s, re));
    }
  }
}

TEST_CASE("pattern generator rejects unsupported syntax") {
  CHECK(!PatternGenerator::compile("^(?=a)b$"));
  CHECK(!PatternGenerator::compile("^(a)\\1$"));
  CHECK(!PatternGenerator::compile("^(ab$"));
  CHECK(!PatternGenerator::compile("*a"));
}

TEST_CASE("utf8 helpers") {
  CHECK(utf8_length("héllo") == 5);
  CHECK(is_valid_utf8("héllo"));
  CHECK(!is_valid_utf8(std::string("\xff\xfe", 2)));
  CHECK(!is_valid_utf8(std::string("\xc3", 1)));
  const std::string bytes("\x00\x01\xff\x10z", 5);
  CHECK(base64_decode(base64_encode(bytes)) == bytes);
  CHECK(base64_encode("ab") == "YWI=");
  CHECK(base64_decode("YWI=") == "ab");
  CHECK(percent_decode(percent_encode("a b/c%")) == "a b/c%");
}
