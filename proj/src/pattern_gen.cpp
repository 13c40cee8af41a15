#include "restex/pattern_gen.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

namespace restex {

struct PatternGenerator::Node {
  enum class Type { Chars, Seq, Alt, Repeat };
  Type type = Type::Seq;
  std::vector<char> chars;  // Chars
  std::vector<std::shared_ptr<const Node>> children;  // Seq, Alt, Repeat (one child)
  int min = 1;
  int max = 1;
};

namespace {

using Node = PatternGenerator::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<char> char_range(char lo, char hi) {
  std::vector<char> out;
  for (int c = lo; c <= hi; ++c) out.push_back(static_cast<char>(c));
  return out;
}

std::vector<char> digits() { return char_range('0', '9'); }

std::vector<char> word_chars() {
  auto out = char_range('a', 'z');
  for (char c : char_range('A', 'Z')) out.push_back(c);
  for (char c : digits()) out.push_back(c);
  out.push_back('_');
  return out;
}

/// Printable ASCII without space; the universe for '.' and negated classes.
std::vector<char> printable() { return char_range('!', '~'); }

NodePtr chars_node(std::vector<char> chars) {
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  if (chars.empty()) throw Unsupported("empty character set");
  auto n = std::make_shared<Node>();
  n->type = Node::Type::Chars;
  n->chars = std::move(chars);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    auto root = alternation();
    if (pos_ != s_.size()) throw Unsupported("unbalanced parenthesis");
    return root;
  }

 private:
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  NodePtr alternation() {
    std::vector<NodePtr> branches{sequence()};
    while (!done() && peek() == '|') {
      ++pos_;
      branches.push_back(sequence());
    }
    if (branches.size() == 1) return branches.front();
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Alt;
    n->children = std::move(branches);
    return n;
  }

  NodePtr sequence() {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Seq;
    while (!done() && peek() != '|' && peek() != ')') {
      auto atom_node = atom();
      if (!atom_node) continue;
      n->children.push_back(quantified(atom_node));
    }
    return n;
  }

  NodePtr quantified(NodePtr atom_node) {
    if (done()) return atom_node;
    int lo = 1, hi = 1;
    const char c = peek();
    if (c == '?') { lo = 0; hi = 1; ++pos_; }
    else if (c == '*') { lo = 0; hi = PatternGenerator::kUnboundedExtra; ++pos_; }
    else if (c == '+') { lo = 1; hi = 1 + PatternGenerator::kUnboundedExtra; ++pos_; }
    else if (c == '{') {
      auto close = s_.find('}', pos_);
      if (close == std::string_view::npos) throw Unsupported("unterminated quantifier");
      auto body = std::string(s_.substr(pos_ + 1, close - pos_ - 1));
      auto comma = body.find(',');
      try {
        if (comma == std::string::npos) {
          lo = hi = std::stoi(body);
        } else {
          lo = std::stoi(body.substr(0, comma));
          auto rest = body.substr(comma + 1);
          hi = rest.empty() ? lo + PatternGenerator::kUnboundedExtra : std::stoi(rest);
        }
      } catch (const std::exception&) {
        throw Unsupported("bad quantifier");
      }
      if (lo < 0 || hi < lo) throw Unsupported("bad quantifier bounds");
      pos_ = close + 1;
    } else {
      return atom_node;
    }
    if (!done() && peek() == '?') ++pos_;  // lazy modifier, irrelevant here
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Repeat;
    n->children = {std::move(atom_node)};
    n->min = lo;
    n->max = hi;
    return n;
  }

  /// Returns nullptr for zero-width anchors.
  NodePtr atom() {
    const char c = s_[pos_++];
    switch (c) {
      case '^':
      case '$':
        return nullptr;
      case '.':
        return chars_node(printable());
      case '(': {
        if (!done() && peek() == '?') {
          if (pos_ + 1 < s_.size() && s_[pos_ + 1] == ':') {
            pos_ += 2;
          } else {
            throw Unsupported("lookaround or named group");
          }
        }
        auto inner = alternation();
        if (done() || peek() != ')') throw Unsupported("unbalanced parenthesis");
        ++pos_;
        return inner;
      }
      case '[':
        return char_class();
      case '\\':
        return chars_node(escape(false));
      case '*':
      case '+':
      case '?':
      case '{':
        throw Unsupported("dangling quantifier");
      default:
        return chars_node({c});
    }
  }

  std::vector<char> escape(bool in_class) {
    if (done()) throw Unsupported("trailing backslash");
    const char c = s_[pos_++];
    switch (c) {
      case 'd': return digits();
      case 'w': return word_chars();
      case 's': return {' '};
      case 'D': case 'W': case 'S': case 'b': case 'B':
        throw Unsupported("unsupported escape");
      case 'n': return {'\n'};
      case 't': return {'\t'};
      default:
        if (c >= '1' && c <= '9' && !in_class) throw Unsupported("backreference");
        return {c};
    }
  }

  NodePtr char_class() {
    bool negate = false;
    if (!done() && peek() == '^') {
      negate = true;
      ++pos_;
    }
    std::set<char> members;
    bool first = true;
    while (true) {
      if (done()) throw Unsupported("unterminated class");
      char c = s_[pos_++];
      if (c == ']' && !first) break;
      first = false;
      std::vector<char> item;
      if (c == '\\') {
        item = escape(true);
      } else {
        item = {c};
      }
      if (item.size() == 1 && pos_ + 1 < s_.size() && peek() == '-' && s_[pos_ + 1] != ']') {
        ++pos_;
        char hi = s_[pos_++];
        if (hi == '\\') {
          auto e = escape(true);
          if (e.size() != 1) throw Unsupported("class range to a class");
          hi = e.front();
        }
        if (hi < item.front()) throw Unsupported("reversed range");
        item = char_range(item.front(), hi);
      }
      members.insert(item.begin(), item.end());
    }
    std::vector<char> out;
    if (negate) {
      for (char c : printable()) {
        if (!members.count(c)) out.push_back(c);
      }
    } else {
      out.assign(members.begin(), members.end());
    }
    return chars_node(std::move(out));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void emit(const Node& n, Rng& rng, std::string& out) {
  switch (n.type) {
    case Node::Type::Chars:
      out.push_back(n.chars[rng.below(n.chars.size())]);
      break;
    case Node::Type::Seq:
      for (const auto& c : n.children) emit(*c, rng, out);
      break;
    case Node::Type::Alt:
      emit(*n.children[rng.below(n.children.size())], rng, out);
      break;
    case Node::Type::Repeat: {
      const auto count = rng.between(n.min, n.max);
      for (std::int64_t i = 0; i < count; ++i) emit(*n.children.front(), rng, out);
      break;
    }
  }
}

}  // namespace

std::optional<PatternGenerator> PatternGenerator::compile(std::string_view pattern) {
  try {
    return PatternGenerator(Parser(pattern).parse());
  } catch (const Unsupported&) {
    return std::nullopt;
  }
}

std::string PatternGenerator::generate(Rng& rng) const {
  std::string out;
  emit(*root_, rng, out);
  return out;
}

}  // namespace restex
