#include "restex/names.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace restex {

namespace {

bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_id_marker(const std::string& token) { return token == "id" || token == "ref"; }

std::string join(const std::vector<std::string>& tokens, char sep) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty() && sep != '\0') out += sep;
    out += t;
  }
  return out;
}

}  // namespace

std::vector<std::string> name_tokens(std::string_view name) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(lower(current));
    current.clear();
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    const char c = name[i];
    if (!is_alnum(c)) {
      flush();
      continue;
    }
    if (!current.empty()) {
      const char prev = current.back();
      const bool next_lower = i + 1 < name.size() && is_lower(name[i + 1]);
      // A plural acronym such as "IDs" stays one token.
      const bool plural_acronym_tail =
          next_lower && name[i + 1] == 's' && (i + 2 == name.size() || !is_alnum(name[i + 2]) ||
                                               is_upper(name[i + 2]));
      if ((is_lower(prev) && is_upper(c)) || (is_digit(prev) != is_digit(c)) ||
          (is_upper(prev) && is_upper(c) && next_lower && !plural_acronym_tail)) {
        flush();
      }
    }
    current += c;
  }
  flush();
  return tokens;
}

std::string singularize(std::string_view word_in) {
  const std::string word = lower(word_in);
  static const std::map<std::string, std::string> irregular = {
      {"people", "person"}, {"children", "child"}, {"men", "man"},   {"women", "woman"},
      {"mice", "mouse"},    {"geese", "goose"},    {"feet", "foot"}, {"teeth", "tooth"},
      {"ids", "id"},        {"refs", "ref"},       {"indices", "index"}};
  if (auto it = irregular.find(word); it != irregular.end()) return it->second;
  if (word.size() <= 3) return word;
  if (ends_with(word, "ies")) return word.substr(0, word.size() - 3) + "y";
  if (ends_with(word, "sses")) return word.substr(0, word.size() - 2);
  if (ends_with(word, "xes") || ends_with(word, "ches") || ends_with(word, "shes") ||
      ends_with(word, "zzes")) {
    return word.substr(0, word.size() - 2);
  }
  if (ends_with(word, "ss") || ends_with(word, "us") || ends_with(word, "is")) return word;
  if (ends_with(word, "s")) return word.substr(0, word.size() - 1);
  return word;
}

std::vector<std::string> normalized_tokens(std::string_view name) {
  std::vector<std::string> tokens = name_tokens(name);
  for (auto& t : tokens) t = singularize(t);
  std::vector<std::string> stripped = tokens;
  while (!stripped.empty() && is_id_marker(stripped.back())) stripped.pop_back();
  return stripped.empty() ? tokens : stripped;
}

bool has_id_suffix(std::string_view name) {
  auto tokens = name_tokens(name);
  return !tokens.empty() && is_id_marker(singularize(tokens.back()));
}

bool is_generic_id(std::string_view name) {
  auto tokens = name_tokens(name);
  if (tokens.empty()) return false;
  return std::all_of(tokens.begin(), tokens.end(),
                     [](const std::string& t) { return is_id_marker(singularize(t)); });
}

std::string canonical_noun(std::string_view segment) {
  auto tokens = name_tokens(segment);
  for (auto& t : tokens) t = singularize(t);
  return join(tokens, '_');
}

std::string qualify_name(std::string_view name, std::string_view noun) {
  if (!noun.empty() && is_generic_id(name)) return std::string(noun) + "_" + std::string(name);
  return std::string(name);
}

double match_names(std::string_view a, std::string_view b) {
  auto ta = normalized_tokens(a);
  auto tb = normalized_tokens(b);
  if (ta.empty() || tb.empty()) return 0.0;
  if (ta == tb || join(ta, '\0') == join(tb, '\0')) return 1.0;
  auto singular_joined = [](std::string_view name) {
    std::string out;
    for (const auto& t : name_tokens(name)) out += singularize(t);
    return out;
  };
  if (singular_joined(a) == singular_joined(b)) return 1.0;
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  std::vector<std::string> common;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));
  return 2.0 * static_cast<double>(common.size()) / static_cast<double>(ta.size() + tb.size());
}

}  // namespace restex
