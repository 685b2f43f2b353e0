#pragma once

// HTTP front end over a Facade. Readers work on an immutable Store snapshot;
// replace_store() swaps in a new one atomically, and writers serialize on a
// single mutex.

#include <atomic>
#include <memory>
#include <mutex>
#include <string>

#include "httplib.h"
#include "interlex/facade.hpp"

namespace interlex {

class Service {
 public:
  explicit Service(std::shared_ptr<const Store> store) : store_(std::move(store)) {
    server_.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
    server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  std::shared_ptr<const Store> snapshot() const { return std::atomic_load(&store_); }

  void replace_store(std::shared_ptr<const Store> next) {
    std::lock_guard lock(writer_);
    std::atomic_store(&store_, std::move(next));
  }

  // Binds without serving; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port) {
    int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(Errc::BindFailure, host + ":" + std::to_string(port));
    return bound;
  }

  // Blocks until stop().
  void serve() { server_.listen_after_bind(); }

  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  // Rendered body and status for one request, as the HTTP layer sends it.
  static Response respond(const Store& store, const httplib::Request& req) {
    QueryParams q;
    for (const auto& [k, v] : req.params) q.emplace(k, v);
    return Facade(store).route(req.method, req.path, q, req.body);
  }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    auto store = snapshot();
    Response r = respond(*store, req);
    res.status = r.status;
    res.set_content(render_document(r.body), "application/json");
  }

  std::shared_ptr<const Store> store_;
  std::mutex writer_;
  httplib::Server server_;
};

}  // namespace interlex
