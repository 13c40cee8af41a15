#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "restex/plan.hpp"

namespace httplib {
class Client;
}

namespace restex {

using Millis = std::chrono::milliseconds;

inline constexpr Millis kDefaultRequestTimeout{30000};

/// Raw response as produced by a handler.
struct HttpResponse {
  int status = 200;
  std::map<std::string, std::string> headers;
  std::string body;
};

/// Executes one request, at most one wire attempt. Never throws for
/// transport problems; those are reported in the result.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpExchangeResult execute(const HttpRequest& request, Millis timeout) = 0;
  /// Throws EndpointUnreachable when nothing answers.
  virtual void probe() = 0;
  /// Describes the target for reports.
  virtual std::string describe() const = 0;
};

HttpExchangeResult execute(Transport& transport, const RequestPlan& plan, Millis timeout = kDefaultRequestTimeout);

struct NetworkOptions {
  /// Sent with every request unless the request sets the same header.
  std::map<std::string, std::string> default_headers;
  /// Skip TLS certificate verification.
  bool insecure = false;
};

/// HTTP/1.1 client for "http://host:port[/prefix]" or "https://...". Safe
/// to call from many threads; keep-alive connections are pooled.
class NetworkTransport : public Transport {
 public:
  explicit NetworkTransport(std::string base_url, NetworkOptions options = {});
  ~NetworkTransport() override;

  HttpExchangeResult execute(const HttpRequest& request, Millis timeout) override;
  void probe() override;
  std::string describe() const override { return base_url_; }

 private:
  std::unique_ptr<httplib::Client> acquire();
  void release(std::unique_ptr<httplib::Client> client);

  std::string base_url_;
  std::string origin_;
  std::string prefix_;
  NetworkOptions options_;
  std::mutex mu_;
  std::vector<std::unique_ptr<httplib::Client>> idle_;
};

using Handler = std::function<HttpResponse(const HttpRequest&)>;

/// Calls a handler directly. A call that outlasts the timeout is reported as
/// a timeout once it returns.
class InProcessTransport : public Transport {
 public:
  explicit InProcessTransport(Handler handler, std::string name = "in-process");

  HttpExchangeResult execute(const HttpRequest& request, Millis timeout) override;
  void probe() override {}
  std::string describe() const override { return name_; }

 private:
  Handler handler_;
  std::string name_;
};

/// Splits "scheme://host:port/prefix" into origin and prefix (no trailing
/// slash). Throws std::invalid_argument for anything else.
std::pair<std::string, std::string> split_base_url(const std::string& base_url);

}  // namespace restex
