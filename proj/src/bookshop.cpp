#include "restex/bookshop.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <ctime>
#include <regex>
#include <stdexcept>
#include <variant>

#include "restex/errors.hpp"

namespace restex {

namespace {

constexpr std::array<std::pair<Bug, std::string_view>, kBugCount> kBugNames{{
    {Bug::SchemaNullTimestamp, "schema-null-timestamp"},
    {Bug::GetMissingCustomer500, "get-missing-customer-500"},
    {Bug::DeleteCustomer500, "delete-customer-500"},
    {Bug::InvalidParam2xx, "invalid-param-2xx"},
    {Bug::InventoryLostUpdate, "inventory-lost-update"},
}};

constexpr int kDefaultLimit = 10;
// 2024-01-01T00:00:00Z
constexpr std::time_t kClockStart = 1704067200;

const std::regex& id_regex() {
  static const std::regex re("^[a-z][a-z0-9]{1,31}$");
  return re;
}

const std::regex& email_regex() {
  static const std::regex re(R"(^[a-z0-9._]{1,20}@[a-z]{2,10}\.(com|org|net)$)");
  return re;
}

const std::set<std::string>& formats() {
  static const std::set<std::string> s{"paperback", "hardcover"};
  return s;
}

const std::set<std::string>& countries() {
  static const std::set<std::string> s{"us", "uk", "fr", "de", "il", "in"};
  return s;
}

bool valid_id(const std::string& s) { return std::regex_match(s, id_regex()); }

std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string url_decode(std::string_view s, bool plus_is_space) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else if (plus_is_space && s[i] == '+') {
      out += ' ';
    } else {
      out += s[i];
    }
  }
  return out;
}

HttpResponse json_response(int status, const json& body) {
  return {status, {{"Content-Type", "application/json"}}, body.dump()};
}

HttpResponse error(int status, const std::string& message) {
  return json_response(status, {{"code", status}, {"message", message}});
}

HttpResponse no_content() { return {204, {}, {}}; }

// Request body rules --------------------------------------------------------

enum class FieldKind { Text, Integer, Number, Id, IdSet };

struct Field {
  std::string name;
  FieldKind kind = FieldKind::Text;
  bool required = false;
  double min = 0, max = 0;  // length for Text, value for numbers, items for IdSet
  const std::set<std::string>* choices = nullptr;
  const std::regex* pattern = nullptr;
};

bool integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && std::floor(d) == d;
}

std::optional<std::string> check_field(const Field& f, const json& v) {
  switch (f.kind) {
    case FieldKind::Text: {
      if (!v.is_string()) return f.name + " must be a string";
      const auto s = v.get<std::string>();
      if (f.choices) {
        if (!f.choices->count(s)) return f.name + " is not an allowed value";
        return std::nullopt;
      }
      const auto n = static_cast<double>(code_points(s));
      if (n < f.min || n > f.max) return f.name + " has a bad length";
      if (f.pattern && !std::regex_match(s, *f.pattern)) return f.name + " is malformed";
      return std::nullopt;
    }
    case FieldKind::Integer:
      if (!integral(v)) return f.name + " must be an integer";
      if (v.get<double>() < f.min || v.get<double>() > f.max) return f.name + " is out of range";
      return std::nullopt;
    case FieldKind::Number:
      if (!v.is_number()) return f.name + " must be a number";
      if (v.get<double>() < f.min || v.get<double>() > f.max) return f.name + " is out of range";
      return std::nullopt;
    case FieldKind::Id:
      if (!v.is_string() || !valid_id(v.get<std::string>())) return f.name + " is not a valid id";
      return std::nullopt;
    case FieldKind::IdSet: {
      if (!v.is_array()) return f.name + " must be an array";
      const auto n = static_cast<double>(v.size());
      if (n < f.min || n > f.max) return f.name + " has a bad item count";
      std::set<std::string> seen;
      for (const auto& e : v) {
        if (!e.is_string() || !valid_id(e.get<std::string>())) return f.name + " holds an invalid id";
        if (!seen.insert(e.get<std::string>()).second) return f.name + " holds duplicates";
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Parses and checks a JSON object body. Returns the error message or the body.
std::variant<std::string, json> parse_body(const std::string& text, const std::vector<Field>& fields) {
  json body;
  try {
    body = json::parse(text);
  } catch (const json::parse_error&) {
    return std::string("body is not valid JSON");
  }
  if (!body.is_object()) return std::string("body must be an object");
  for (const auto& f : fields) {
    auto it = body.find(f.name);
    if (it == body.end()) {
      if (f.required) return f.name + " is required";
      continue;
    }
    if (auto err = check_field(f, *it)) return *err;
  }
  return body;
}

const std::vector<Field>& author_input() {
  static const std::vector<Field> f{
      {"name", FieldKind::Text, true, 1, 64},
      {"country", FieldKind::Text, false, 0, 0, &countries()},
  };
  return f;
}

const std::vector<Field>& book_input() {
  static const std::vector<Field> f{
      {"title", FieldKind::Text, true, 1, 128},
      {"authorId", FieldKind::Id, true},
      {"format", FieldKind::Text, true, 0, 0, &formats()},
      {"price", FieldKind::Number, false, 0, 500},
      {"stock", FieldKind::Integer, true, 1, 100},
  };
  return f;
}

const std::vector<Field>& book_update() {
  static const std::vector<Field> f{
      {"title", FieldKind::Text, true, 1, 128},
      {"format", FieldKind::Text, true, 0, 0, &formats()},
      {"price", FieldKind::Number, false, 0, 500},
  };
  return f;
}

const std::vector<Field>& customer_input() {
  static const std::vector<Field> f{
      {"name", FieldKind::Text, true, 1, 64},
      {"email", FieldKind::Text, false, 0, 64, nullptr, &email_regex()},
  };
  return f;
}

const std::vector<Field>& order_input() {
  static const std::vector<Field> f{
      {"customerId", FieldKind::Id, true},
      {"bookIds", FieldKind::IdSet, true, 1, 5},
  };
  return f;
}

}  // namespace

std::string_view to_string(Bug bug) {
  for (const auto& [b, name] : kBugNames)
    if (b == bug) return name;
  return "?";
}

Bug bug_from_string(std::string_view text) {
  for (const auto& [b, name] : kBugNames)
    if (name == text) return b;
  throw std::invalid_argument("unknown bug: " + std::string(text));
}

const std::array<Bug, kBugCount>& all_bugs() {
  static const std::array<Bug, kBugCount> bugs{Bug::SchemaNullTimestamp, Bug::GetMissingCustomer500,
                                               Bug::DeleteCustomer500, Bug::InvalidParam2xx,
                                               Bug::InventoryLostUpdate};
  return bugs;
}

// ---------------------------------------------------------------------------

struct Bookshop::Data {
  struct Author {
    std::string name;
    std::optional<std::string> country;
    std::string created;
  };
  struct Book {
    std::string title;
    std::string author_id;
    std::string format;
    std::optional<double> price;
    int stock = 0;
    int inventory = 0;
    int sold = 0;
    /// Copies ordered, counted atomically; `sold` must always equal it.
    int ordered_total = 0;
    std::string created;
  };
  struct Customer {
    std::string name;
    std::optional<std::string> email;
    std::string created;
  };
  struct Order {
    std::string customer_id;
    std::vector<std::string> book_ids;
    std::string created;
  };

  std::map<std::string, Author> authors;
  std::map<std::string, Book> books;
  std::map<std::string, Customer> customers;
  std::map<std::string, Order> orders;
  std::map<char, std::uint64_t> counters;
  std::set<std::string> issued;
  std::mt19937_64 rng;
  std::time_t clock = kClockStart;
};

Bookshop::Bookshop(BookshopOptions options) : options_(std::move(options)) {
  for (auto& b : bugs_) b = false;
  for (auto b : options_.bugs) bugs_[static_cast<std::size_t>(b)] = true;
  reset();
}

Bookshop::~Bookshop() = default;

void Bookshop::set_bug(Bug bug, bool enabled) { bugs_[static_cast<std::size_t>(bug)] = enabled; }
bool Bookshop::bug_enabled(Bug bug) const { return bugs_[static_cast<std::size_t>(bug)]; }

void Bookshop::reset() {
  auto fresh = std::make_unique<Data>();
  fresh->rng.seed(options_.id_seed);
  std::lock_guard lock(mu_);
  data_ = std::move(fresh);
}

std::optional<int> Bookshop::raw_inventory(const std::string& book_id) const {
  std::lock_guard lock(mu_);
  auto it = data_->books.find(book_id);
  if (it == data_->books.end()) return std::nullopt;
  return it->second.inventory;
}

Handler Bookshop::handler() {
  return [this](const HttpRequest& r) { return handle(r); };
}

std::string Bookshop::next_id(char prefix) {
  if (!options_.random_ids) return prefix + std::to_string(++data_->counters[prefix]);
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  for (;;) {
    std::string id(1, prefix);
    for (int i = 0; i < 8; ++i) id += kAlphabet[data_->rng() % 36];
    if (data_->issued.insert(id).second) return id;
  }
}

std::string Bookshop::timestamp() {
  const std::time_t t = data_->clock++;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

HttpResponse Bookshop::handle(const HttpRequest& request) {
  ++requests_;
  try {
    return route(request);
  } catch (const std::exception& e) {
    return error(500, std::string("internal error: ") + e.what());
  }
}

HttpResponse Bookshop::route(const HttpRequest& request) {
  const auto qpos = request.target.find('?');
  const std::string_view raw_path = std::string_view(request.target).substr(0, qpos);
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (start <= raw_path.size()) {
    auto end = raw_path.find('/', start);
    if (end == std::string_view::npos) end = raw_path.size();
    if (end > start) segments.push_back(url_decode(raw_path.substr(start, end - start), false));
    start = end + 1;
  }
  std::map<std::string, std::string> query;
  if (qpos != std::string::npos) {
    std::string_view qs = std::string_view(request.target).substr(qpos + 1);
    while (!qs.empty()) {
      auto amp = qs.find('&');
      auto pair = qs.substr(0, amp);
      auto eq = pair.find('=');
      if (!pair.empty()) {
        query[url_decode(pair.substr(0, eq), true)] =
            eq == std::string_view::npos ? "" : url_decode(pair.substr(eq + 1), true);
      }
      if (amp == std::string_view::npos) break;
      qs.remove_prefix(amp + 1);
    }
  }
  const std::string& method = request.method;

  if (segments.empty()) {
    if (method == "GET") return json_response(200, {{"service", "bookshop"}});
    return error(405, "method not allowed");
  }
  if (segments[0] == "_admin") return admin(method, segments, query, request.body);

  static const std::map<std::string, char> kCollections{
      {"authors", 'a'}, {"books", 'b'}, {"customers", 'c'}, {"orders", 'o'}};
  auto coll = kCollections.find(segments[0]);
  if (coll == kCollections.end() || segments.size() > 2) return error(404, "no such route");
  const char kind = coll->second;

  const bool null_ts = bug_enabled(Bug::SchemaNullTimestamp);
  auto metadata = [&](const std::string& created) {
    return json{{"creationTimestamp", null_ts ? json(nullptr) : json(created)}};
  };
  auto author_json = [&](const std::string& id, const Data::Author& a) {
    json j{{"authorId", id}, {"name", a.name}, {"metadata", metadata(a.created)}};
    if (a.country) j["country"] = *a.country;
    return j;
  };
  // Empty when the inventory ledger no longer adds up.
  auto book_json = [&](const std::string& id, const Data::Book& b) -> std::optional<json> {
    if (b.sold != b.ordered_total || b.inventory + b.sold != b.stock) return std::nullopt;
    json j{{"bookId", id},         {"title", b.title}, {"authorId", b.author_id},
           {"format", b.format},   {"stock", b.stock}, {"inventory", b.inventory},
           {"sold", b.sold},       {"metadata", metadata(b.created)}};
    if (b.price) j["price"] = *b.price;
    return j;
  };
  auto customer_json = [&](const std::string& id, const Data::Customer& c) {
    json j{{"customerId", id}, {"name", c.name}, {"metadata", metadata(c.created)}};
    if (c.email) j["email"] = *c.email;
    return j;
  };
  auto order_json = [&](const std::string& id, const Data::Order& o) {
    return json{{"orderId", id}, {"customerId", o.customer_id}, {"bookIds", o.book_ids},
                {"metadata", metadata(o.created)}};
  };
  const auto ledger_error = [] { return error(500, "inventory ledger inconsistent"); };

  // Collection routes.
  if (segments.size() == 1) {
    if (method == "GET") {
      int limit = kDefaultLimit;
      if (auto it = query.find("limit"); it != query.end()) {
        const auto& s = it->second;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), limit);
        if (s.empty() || ec != std::errc() || end != s.data() + s.size() || limit < 1 || limit > 10)
          return error(400, "limit must be an integer between 1 and 10");
      }
      std::optional<std::string> format;
      if (kind == 'b') {
        if (auto it = query.find("format"); it != query.end()) {
          if (!formats().count(it->second)) return error(400, "unknown format");
          format = it->second;
        }
      }
      std::lock_guard lock(mu_);
      json out = json::array();
      auto take = [&](const auto& map, auto render) -> bool {
        for (const auto& [id, v] : map) {
          if (static_cast<int>(out.size()) >= limit) break;
          std::optional<json> j = render(id, v);
          if (!j) return false;
          if (!j->is_null()) out.push_back(std::move(*j));
        }
        return true;
      };
      bool ok = true;
      switch (kind) {
        case 'a':
          ok = take(data_->authors, [&](auto& id, auto& v) { return std::optional<json>(author_json(id, v)); });
          break;
        case 'b':
          ok = take(data_->books, [&](auto& id, auto& v) -> std::optional<json> {
            if (format && v.format != *format) return json(nullptr);
            return book_json(id, v);
          });
          break;
        case 'c':
          ok = take(data_->customers, [&](auto& id, auto& v) { return std::optional<json>(customer_json(id, v)); });
          break;
        default:
          ok = take(data_->orders, [&](auto& id, auto& v) { return std::optional<json>(order_json(id, v)); });
      }
      if (!ok) return ledger_error();
      return json_response(200, out);
    }
    if (method != "POST") return error(405, "method not allowed");

    const auto& rules = kind == 'a' ? author_input() : kind == 'b' ? book_input() : kind == 'c' ? customer_input()
                                                                                                  : order_input();
    auto parsed = parse_body(request.body, rules);
    if (auto* msg = std::get_if<std::string>(&parsed)) return error(400, *msg);
    const json body = std::get<json>(std::move(parsed));
    if (kind == 'o') return create_order(body);

    std::lock_guard lock(mu_);
    switch (kind) {
      case 'a': {
        Data::Author a{body["name"], std::nullopt, timestamp()};
        if (body.contains("country")) a.country = body["country"].get<std::string>();
        auto id = next_id('a');
        auto& stored = data_->authors[id] = std::move(a);
        return json_response(201, author_json(id, stored));
      }
      case 'b': {
        const auto author = body["authorId"].get<std::string>();
        if (!data_->authors.count(author)) return error(404, "author " + author + " not found");
        Data::Book b;
        b.title = body["title"];
        b.author_id = author;
        b.format = body["format"];
        if (body.contains("price")) b.price = body["price"].get<double>();
        b.stock = b.inventory = static_cast<int>(body["stock"].get<double>());
        b.created = timestamp();
        auto id = next_id('b');
        auto& stored = data_->books[id] = std::move(b);
        return json_response(201, *book_json(id, stored));
      }
      default: {
        Data::Customer c{body["name"], std::nullopt, timestamp()};
        if (body.contains("email")) c.email = body["email"].get<std::string>();
        auto id = next_id('c');
        auto& stored = data_->customers[id] = std::move(c);
        return json_response(201, customer_json(id, stored));
      }
    }
  }

  // Item routes.
  const std::string& id = segments[1];
  if (method != "GET" && method != "DELETE" && !(method == "PUT" && kind != 'o'))
    return error(405, "method not allowed");
  if (!valid_id(id)) {
    if (method == "DELETE" && bug_enabled(Bug::InvalidParam2xx)) return no_content();
    return error(400, "malformed id '" + id + "'");
  }

  std::optional<json> update;
  if (method == "PUT") {
    const auto& rules = kind == 'a' ? author_input() : kind == 'b' ? book_update() : customer_input();
    auto parsed = parse_body(request.body, rules);
    if (auto* msg = std::get_if<std::string>(&parsed)) return error(400, *msg);
    update = std::get<json>(std::move(parsed));
  }

  std::lock_guard lock(mu_);
  auto missing = [&] { return error(404, std::string(segments[0]) + " " + id + " not found"); };
  auto erase = [&](auto& map) {
    if (!map.erase(id)) return missing();
    return no_content();
  };
  switch (kind) {
    case 'a': {
      auto it = data_->authors.find(id);
      if (method == "DELETE") return erase(data_->authors);
      if (it == data_->authors.end()) return missing();
      if (update) {
        it->second.name = (*update)["name"];
        it->second.country.reset();
        if (update->contains("country")) it->second.country = (*update)["country"].get<std::string>();
      }
      return json_response(200, author_json(id, it->second));
    }
    case 'b': {
      auto it = data_->books.find(id);
      if (method == "DELETE") return erase(data_->books);
      if (it == data_->books.end()) return missing();
      if (update) {
        it->second.title = (*update)["title"];
        it->second.format = (*update)["format"];
        it->second.price.reset();
        if (update->contains("price")) it->second.price = (*update)["price"].get<double>();
      }
      auto j = book_json(id, it->second);
      if (!j) return ledger_error();
      return json_response(200, *j);
    }
    case 'c': {
      auto it = data_->customers.find(id);
      if (it == data_->customers.end()) {
        if (method == "GET" && bug_enabled(Bug::GetMissingCustomer500)) {
          return error(500, "customer lookup failed");
        }
        return missing();
      }
      if (method == "DELETE") {
        if (bug_enabled(Bug::DeleteCustomer500)) return error(500, "customer delete failed");
        return erase(data_->customers);
      }
      if (update) {
        it->second.name = (*update)["name"];
        it->second.email.reset();
        if (update->contains("email")) it->second.email = (*update)["email"].get<std::string>();
      }
      return json_response(200, customer_json(id, it->second));
    }
    default: {
      auto it = data_->orders.find(id);
      if (method == "DELETE") return erase(data_->orders);
      if (it == data_->orders.end()) return missing();
      return json_response(200, order_json(id, it->second));
    }
  }
}

HttpResponse Bookshop::create_order(const json& body) {
  const auto customer = body["customerId"].get<std::string>();
  const auto book_ids = body["bookIds"].get<std::vector<std::string>>();
  const int restock = options_.restock;

  std::unique_lock lock(mu_);
  if (!data_->customers.count(customer)) return error(404, "customer " + customer + " not found");
  for (const auto& b : book_ids) {
    if (!data_->books.count(b)) return error(404, "book " + b + " not found");
  }
  auto finish = [&] {
    Data::Order o{customer, book_ids, timestamp()};
    auto id = next_id('o');
    auto& stored = data_->orders[id] = std::move(o);
    return json_response(201, json{{"orderId", id},
                                   {"customerId", stored.customer_id},
                                   {"bookIds", stored.book_ids},
                                   {"metadata",
                                    {{"creationTimestamp", bug_enabled(Bug::SchemaNullTimestamp)
                                                               ? json(nullptr)
                                                               : json(stored.created)}}}});
  };

  if (!bug_enabled(Bug::InventoryLostUpdate)) {
    for (const auto& b : book_ids) {
      auto& book = data_->books[b];
      ++book.ordered_total;
      if (book.inventory == 0) {
        book.stock += restock;
        book.inventory += restock;
      }
      --book.inventory;
      ++book.sold;
    }
    return finish();
  }

  // Read, release the lock, then write back what was read.
  struct Snapshot {
    int stock, inventory, sold;
  };
  std::vector<Snapshot> seen;
  for (const auto& b : book_ids) {
    const auto& book = data_->books[b];
    seen.push_back({book.stock, book.inventory, book.sold});
  }
  lock.unlock();
  std::this_thread::sleep_for(options_.race_window);
  lock.lock();
  for (std::size_t i = 0; i < book_ids.size(); ++i) {
    auto it = data_->books.find(book_ids[i]);
    if (it == data_->books.end()) continue;
    auto s = seen[i];
    if (s.inventory == 0) {
      s.stock += restock;
      s.inventory += restock;
    }
    ++it->second.ordered_total;
    it->second.stock = s.stock;
    it->second.inventory = s.inventory - 1;
    it->second.sold = s.sold + 1;
  }
  return finish();
}

HttpResponse Bookshop::admin(const std::string& method, const std::vector<std::string>& segments,
                             const std::map<std::string, std::string>& query, const std::string& body) {
  const std::string what = segments.size() > 1 ? segments[1] : "";
  auto toggles = [&] {
    json j = json::object();
    for (auto b : all_bugs()) j[std::string(to_string(b))] = bug_enabled(b);
    return j;
  };
  if (what == "toggles") {
    if (method == "GET") return json_response(200, toggles());
    if (method != "PUT" && method != "POST") return error(405, "method not allowed");
    try {
      const auto j = json::parse(body);
      for (const auto& [k, v] : j.items()) set_bug(bug_from_string(k), v.get<bool>());
    } catch (const std::exception& e) {
      return error(400, e.what());
    }
    return json_response(200, toggles());
  }
  if (what == "reset" && method == "POST") {
    reset();
    return json_response(200, {{"reset", true}});
  }
  if (what == "stall" && method == "GET") {
    int ms = 0;
    if (auto it = query.find("ms"); it != query.end()) ms = std::atoi(it->second.c_str());
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    return json_response(200, {{"stalled_ms", ms}});
  }
  return error(404, "no such admin route");
}

// ---------------------------------------------------------------------------

HttpServer::HttpServer(Handler handler, int port, std::string host)
    : handler_(std::move(handler)), host_(std::move(host)), server_(std::make_unique<httplib::Server>()) {
  server_->new_task_queue = [] { return new httplib::ThreadPool(64); };
  server_->set_keep_alive_max_count(100000);
  server_->set_tcp_nodelay(true);
  // Without SO_REUSEPORT a second server on the same port fails to bind.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  auto serve = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.target, {}, req.body};
    for (const auto& [k, v] : req.headers) r.headers[k] = v;
    auto out = handler_(r);
    res.status = out.status;
    std::string content_type;
    for (const auto& [k, v] : out.headers) {
      if (httplib::detail::compare_case_ignore(k, "Content-Type")) {
        content_type = v;
      } else {
        res.set_header(k, v);
      }
    }
    if (!out.body.empty() || !content_type.empty()) res.set_content(out.body, content_type);
  };
  server_->Get(".*", serve);
  server_->Post(".*", serve);
  server_->Put(".*", serve);
  server_->Delete(".*", serve);
  server_->Patch(".*", serve);
  server_->Options(".*", serve);

  if (port == 0) {
    port_ = server_->bind_to_any_port(host_);
    if (port_ < 0) throw PortInUse("cannot bind " + host_);
  } else {
    if (!server_->bind_to_port(host_, port)) throw PortInUse("port " + std::to_string(port) + " is in use");
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

HttpServer::~HttpServer() { stop(); }

std::string HttpServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

void HttpServer::stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

}  // namespace restex
