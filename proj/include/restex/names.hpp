#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace restex {

/// Default similarity threshold above which two names denote the same entity.
inline constexpr double kDefaultNameThreshold = 0.8;

/// Splits an identifier into lowercase word tokens. Word boundaries are
/// non-alphanumeric characters, lower-to-upper case changes, the end of an
/// acronym run ("HTTPServer" -> http, server) and letter/digit changes.
std::vector<std::string> name_tokens(std::string_view name);

/// Heuristic English singular of a lowercase word ("categories" -> "category").
std::string singularize(std::string_view word);

/// Tokens after singularization with trailing "id"/"ref" tokens removed. When
/// stripping would leave nothing the unstripped tokens are returned.
std::vector<std::string> normalized_tokens(std::string_view name);

/// True when the last token of `name` is an id or ref marker ("bookId", "id").
bool has_id_suffix(std::string_view name);

/// True when the name is nothing but an id marker ("id", "ID", "_ref").
bool is_generic_id(std::string_view name);

/// Singular snake_case noun for a path segment or schema name ("book-reviews"
/// -> "book_review").
std::string canonical_noun(std::string_view segment);

/// Prefixes a generic id name with the owning noun ("id" under "customer" ->
/// "customer_id"); other names are returned unchanged.
std::string qualify_name(std::string_view name, std::string_view noun);

/// Symmetric, deterministic similarity in [0, 1]: 1.0 when the normalized
/// token sequences (or their concatenations) are equal, otherwise the Dice
/// coefficient of the token multisets.
double match_names(std::string_view a, std::string_view b);

}  // namespace restex
