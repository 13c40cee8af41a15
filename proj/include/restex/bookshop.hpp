#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "restex/http.hpp"

namespace httplib {
class Server;
}

namespace restex {

/// Misbehaviors the bookshop can inject, one at a time or together.
enum class Bug {
  SchemaNullTimestamp,
  GetMissingCustomer500,
  DeleteCustomer500,
  InvalidParam2xx,
  InventoryLostUpdate,
};

inline constexpr std::size_t kBugCount = 5;

std::string_view to_string(Bug bug);
/// Throws std::invalid_argument for unknown ids.
Bug bug_from_string(std::string_view text);
const std::array<Bug, kBugCount>& all_bugs();

/// OpenAPI document the bookshop conforms to (YAML).
const std::string& bookshop_spec_yaml();

struct BookshopOptions {
  std::set<Bug> bugs;
  /// Random ids instead of "a1", "b1", ...
  bool random_ids = false;
  std::uint64_t id_seed = 0;
  /// Copies added when an order finds a book out of stock.
  int restock = 10;
  /// Gap between read and write of the non-atomic order path.
  std::chrono::microseconds race_window{2000};
};

/// In-memory bookshop service. Thread-safe; with no bugs enabled every
/// response conforms to the shipped spec and every mutation is atomic.
class Bookshop {
 public:
  explicit Bookshop(BookshopOptions options = {});
  ~Bookshop();
  Bookshop(const Bookshop&) = delete;
  Bookshop& operator=(const Bookshop&) = delete;

  HttpResponse handle(const HttpRequest& request);
  Handler handler();

  void set_bug(Bug bug, bool enabled);
  bool bug_enabled(Bug bug) const;
  /// Drops all data and restarts id assignment. Bugs stay as they are.
  void reset();

  /// Stored inventory of a book, bypassing the HTTP surface.
  std::optional<int> raw_inventory(const std::string& book_id) const;
  std::size_t request_count() const { return requests_.load(); }

 private:
  struct Data;

  HttpResponse route(const HttpRequest& request);
  HttpResponse admin(const std::string& method, const std::vector<std::string>& segments,
                     const std::map<std::string, std::string>& query, const std::string& body);
  HttpResponse create_order(const json& body);
  std::string next_id(char prefix);
  std::string timestamp();

  BookshopOptions options_;
  std::array<std::atomic<bool>, kBugCount> bugs_{};
  std::atomic<std::size_t> requests_{0};
  mutable std::mutex mu_;
  std::unique_ptr<Data> data_;
};

/// Serves a handler over HTTP/1.1 on a loopback port until destroyed.
class HttpServer {
 public:
  /// Port 0 picks a free port. Throws PortInUse when binding fails.
  HttpServer(Handler handler, int port = 0, std::string host = "127.0.0.1");
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const;
  void stop();

 private:
  Handler handler_;
  std::string host_;
  int port_ = 0;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace restex
