#include "restex/http.hpp"

#include <httplib.h>

#include <regex>

#include "restex/errors.hpp"

namespace restex {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

HttpExchangeResult execute(Transport& transport, const RequestPlan& plan, Millis timeout) {
  return transport.execute(to_http_request(plan), timeout);
}

std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  static const std::regex re(R"(^(https?://[^/?#]+)(/[^?#]*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(base_url, m, re)) throw std::invalid_argument("not an http(s) base URL: " + base_url);
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

NetworkTransport::NetworkTransport(std::string base_url, NetworkOptions options)
    : base_url_(std::move(base_url)), options_(std::move(options)) {
  std::tie(origin_, prefix_) = split_base_url(base_url_);
}

NetworkTransport::~NetworkTransport() = default;

std::unique_ptr<httplib::Client> NetworkTransport::acquire() {
  {
    std::lock_guard lock(mu_);
    if (!idle_.empty()) {
      auto c = std::move(idle_.back());
      idle_.pop_back();
      return c;
    }
  }
  auto c = std::make_unique<httplib::Client>(origin_);
  c->set_keep_alive(true);
  c->set_tcp_nodelay(true);
  c->enable_server_certificate_verification(!options_.insecure);
  return c;
}

void NetworkTransport::release(std::unique_ptr<httplib::Client> client) {
  std::lock_guard lock(mu_);
  idle_.push_back(std::move(client));
}

HttpExchangeResult NetworkTransport::execute(const HttpRequest& request, Millis timeout) {
  auto client = acquire();
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client->set_connection_timeout(secs, usecs);
  client->set_read_timeout(secs, usecs);
  client->set_write_timeout(secs, usecs);

  httplib::Request req;
  req.method = request.method;
  req.path = prefix_ + request.target;
  for (const auto& [k, v] : options_.default_headers) {
    if (!request.headers.count(k)) req.headers.emplace(k, v);
  }
  for (const auto& [k, v] : request.headers) req.headers.emplace(k, v);
  req.body = request.body;

  const auto start = std::chrono::steady_clock::now();
  auto res = client->send(req);
  const double ms = elapsed_ms(start);
  if (!res) {
    // The connection is in an unknown state and is not returned to the pool.
    const auto err = res.error();
    const auto detail = httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout) return make_error(TransportError::Timeout, detail, ms);
    if (err == httplib::Error::Connection) return make_error(TransportError::ConnectionRefused, detail, ms);
    if (err == httplib::Error::Read && ms >= 0.9 * static_cast<double>(timeout.count()))
      return make_error(TransportError::Timeout, detail, ms);
    return make_error(TransportError::ProtocolError, detail, ms);
  }
  std::map<std::string, std::string> headers;
  for (const auto& [k, v] : res->headers) headers[k] = v;
  auto out = make_result(res->status, std::move(headers), std::move(res->body), ms);
  release(std::move(client));
  return out;
}

void NetworkTransport::probe() {
  HttpRequest req{"GET", "/", {}, {}};
  auto r = execute(req, Millis(5000));
  if (!r.ok()) {
    throw EndpointUnreachable("endpoint " + base_url_ + " unreachable: " + std::string(to_string(*r.transport_error)) +
                              " (" + r.error_detail + ")");
  }
}

InProcessTransport::InProcessTransport(Handler handler, std::string name)
    : handler_(std::move(handler)), name_(std::move(name)) {}

HttpExchangeResult InProcessTransport::execute(const HttpRequest& request, Millis timeout) {
  const auto start = std::chrono::steady_clock::now();
  HttpResponse r;
  try {
    r = handler_(request);
  } catch (const std::exception& e) {
    return make_error(TransportError::ProtocolError, e.what(), elapsed_ms(start));
  }
  const double ms = elapsed_ms(start);
  if (ms > static_cast<double>(timeout.count())) return make_error(TransportError::Timeout, "handler exceeded timeout", ms);
  return make_result(r.status, std::move(r.headers), std::move(r.body), ms);
}

}  // namespace restex
