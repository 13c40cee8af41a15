#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "restex/rng.hpp"

namespace restex {

/// Produces strings that match a regular expression drawn from a practical
/// subset: literals, escapes (\d \w \s and escaped punctuation), character
/// classes with ranges and negation, groups with alternation, and the
/// quantifiers ? * + {n} {n,} {n,m}. Anchors are accepted and ignored.
/// Lookarounds and backreferences are not supported.
class PatternGenerator {
 public:
  /// nullopt when the pattern uses unsupported syntax.
  static std::optional<PatternGenerator> compile(std::string_view pattern);

  /// Open-ended quantifiers (* + {n,}) repeat at most this many extra times.
  static constexpr int kUnboundedExtra = 8;

  std::string generate(Rng& rng) const;

  struct Node;

 private:
  explicit PatternGenerator(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace restex
