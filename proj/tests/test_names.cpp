#include <doctest.h>

#include "restex/names.hpp"

using namespace restex;

TEST_CASE("tokenization splits camel, snake, acronyms and digits") {
  CHECK(name_tokens("bookId") == std::vector<std::string>{"book", "id"});
  CHECK(name_tokens("book_id") == std::vector<std::string>{"book", "id"});
  CHECK(name_tokens("HTTPServer") == std::vector<std::string>{"http", "server"});
  CHECK(name_tokens("bookIDs") == std::vector<std::string>{"book", "ids"});
  CHECK(name_tokens("v2Items") == std::vector<std::string>{"v", "2", "items"});
  CHECK(name_tokens("--").empty());
}

TEST_CASE("singularization rules") {
  CHECK(singularize("books") == "book");
  CHECK(singularize("categories") == "category");
  CHECK(singularize("addresses") == "address");
  CHECK(singularize("boxes") == "box");
  CHECK(singularize("status") == "status");
  CHECK(singularize("people") == "person");
  CHECK(singularize("ids") == "id");
  CHECK(singularize("bus") == "bus");
}

TEST_CASE("match_names examples") {
  CHECK(match_names("bookId", "book_id") == 1.0);
  // authorId -> [author, id] -> strip id -> [author]; Author -> [author]
  CHECK(match_names("authorId", "Author") == 1.0);
  // [customer] vs [order]: no shared token
  CHECK(match_names("customerId", "orderId") < kDefaultNameThreshold);
  CHECK(match_names("customerId", "orderId") == 0.0);
  CHECK(match_names("bookIds", "bookId") == 1.0);
  CHECK(match_names("bookid", "book_id") == 1.0);
  // [author, name] vs [author]: dice 2*1/3
  CHECK(match_names("author_name", "authorId") == doctest::Approx(2.0 / 3.0));
  CHECK(match_names("id", "id") == 1.0);
  CHECK(match_names("id", "bookId") == 0.0);
}

TEST_CASE("match_names is symmetric and bounded") {
  const std::vector<std::string> names = {"bookId", "book_id", "Author", "authorRef", "customer",
                                          "orderIds", "id", "HTTPServerId", "shipping_address",
                                          "addresses", "x", "book-reviews"};
  for (const auto& a : names) {
    for (const auto& b : names) {
      const double ab = match_names(a, b);
      CHECK(ab == match_names(b, a));
      CHECK(ab >= 0.0);
      CHECK(ab <= 1.0);
    }
    CHECK(match_names(a, a) == 1.0);
  }
}

TEST_CASE("id helpers") {
  CHECK(has_id_suffix("authorId"));
  CHECK(has_id_suffix("bookIds"));
  CHECK(has_id_suffix("id"));
  CHECK_FALSE(has_id_suffix("name"));
  CHECK(is_generic_id("id"));
  CHECK(is_generic_id("ID"));
  CHECK_FALSE(is_generic_id("bookId"));
  CHECK(qualify_name("id", "customer") == "customer_id");
  CHECK(qualify_name("bookId", "customer") == "bookId");
  CHECK(canonical_noun("book-reviews") == "book_review");
  CHECK(canonical_noun("Customers") == "customer");
}
