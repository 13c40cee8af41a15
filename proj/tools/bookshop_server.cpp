#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

#include "restex/bookshop.hpp"
#include "restex/errors.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bookshop reference service with switchable faults", "bookshop_server"};
  int port = 8080;
  std::string host = "127.0.0.1";
  std::vector<std::string> bugs;
  bool random_ids = false;
  std::uint64_t id_seed = 0;
  int restock = 10;
  app.add_option("--port", port, "Port (0 picks a free one)");
  app.add_option("--host", host, "Address to bind");
  app.add_option("--bug", bugs, "Enable a bug (repeatable)");
  app.add_flag("--random-ids", random_ids, "Assign random ids");
  app.add_option("--id-seed", id_seed, "Seed for random ids");
  app.add_option("--restock", restock, "Copies added when an order finds a book out of stock");
  CLI11_PARSE(app, argc, argv);

  restex::BookshopOptions options;
  try {
    for (const auto& b : bugs) options.bugs.insert(restex::bug_from_string(b));
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  options.random_ids = random_ids;
  options.id_seed = id_seed;
  options.restock = restock;

  restex::Bookshop shop(options);
  try {
    restex::HttpServer server(shop.handler(), port, host);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << server.base_url() << std::endl;
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  } catch (const restex::PortInUse& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
