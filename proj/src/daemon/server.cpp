#include "smartpaste/daemon.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

namespace smartpaste::daemon {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

Json error_body(ErrorCode code, const std::string& message) {
  return Json{{"code", std::string(to_string(code))}, {"message", message}};
}

AppContext dest_from_wire(const Json& j) {
  if (j.is_string()) return AppContext{j.get<std::string>(), 0, "", std::nullopt};
  return app_context_from_json(j);
}

class Session : public PluginConnection, public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Daemon& daemon) : ws_(std::move(socket)), daemon_(daemon) {}

  void start() {
    websocket::stream_base::timeout t{};
    t.handshake_timeout = std::chrono::seconds(5);
    t.idle_timeout = std::chrono::milliseconds(daemon_.config().heartbeat_ms);
    t.keep_alive_pings = true;
    ws_.set_option(t);
    ws_.text(true);
    ws_.async_accept(beast::bind_front_handler(&Session::on_accept, shared_from_this()));
  }

  void send(const Json& msg) override {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = msg.dump()]() mutable {
      self->outbox_.push_back(std::move(text));
      if (self->outbox_.size() == 1) self->write_next();
    });
  }

  /// Releases everything the daemon holds on behalf of this connection.
  void release() {
    if (released_.exchange(true)) return;
    daemon_.plugins().drop(this);
    std::vector<std::uint64_t> tokens;
    {
      std::lock_guard lock(tokens_mu_);
      tokens.swap(tokens_);
    }
    for (auto t : tokens) daemon_.unsubscribe(t);
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return release();
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      if (ec != websocket::error::closed) spdlog::debug("wire connection ended: {}", ec.message());
      return release();
    }
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    read_next();
  }

  void write_next() {
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) return self->release();
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write_next();
                    });
  }

  void reply(const Json& request, Json body) {
    body["v"] = std::string(kWireVersion);
    body["type"] = request.value("type", std::string("error"));
    if (request.contains("request_id")) body["request_id"] = request["request_id"];
    body["ok"] = true;
    send(body);
  }

  void reply_error(const Json& request, ErrorCode code, const std::string& message) {
    Json body{{"v", std::string(kWireVersion)},
              {"type", request.is_object() ? request.value("type", std::string("error")) : "error"},
              {"ok", false},
              {"error", error_body(code, message)}};
    if (request.is_object() && request.contains("request_id")) body["request_id"] = request["request_id"];
    send(body);
  }

  void follow(const std::string& job_id) {
    std::weak_ptr<Session> weak = weak_from_this();
    auto token = daemon_.subscribe(job_id, [weak](const JobEvent& e) {
      if (auto self = weak.lock()) self->send(to_wire(e));
    });
    std::lock_guard lock(tokens_mu_);
    tokens_.push_back(token);
  }

  void handle(const std::string& text) {
    Json msg;
    try {
      msg = Json::parse(text);
    } catch (const Json::parse_error& e) {
      return reply_error(Json(), ErrorCode::Schema, std::string("not JSON: ") + e.what());
    }
    try {
      if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
        throw Error(ErrorCode::Schema, "a message needs a string 'type'");
      if (msg.value("v", std::string()) != kWireVersion)
        throw Error(ErrorCode::Schema, "unsupported wire version; expected " + std::string(kWireVersion));
      dispatch(msg);
    } catch (const Error& e) {
      reply_error(msg, e.code(), e.what());
    } catch (const Json::exception& e) {
      reply_error(msg, ErrorCode::Schema, e.what());
    }
  }

  void dispatch(const Json& msg) {
    const std::string type = msg["type"];
    if (type == "copy_event") {
      auto snapshot = parse_sim_fixture(msg.at("fixture").dump());
      auto id = daemon_.on_copy(std::move(snapshot));
      reply(msg, Json{{"context_id", id ? Json(*id) : Json()}});
    } else if (type == "smart_paste") {
      std::optional<std::string> instruction, context_id;
      if (auto i = msg.find("instruction"); i != msg.end() && !i->is_null()) instruction = i->get<std::string>();
      if (auto c = msg.find("context_id"); c != msg.end() && !c->is_null()) context_id = c->get<std::string>();
      auto job_id = daemon_.smart_paste(dest_from_wire(msg.at("dest")), instruction, context_id);
      reply(msg, Json{{"job_id", job_id}, {"context_id", daemon_.job_context(job_id)}});
      if (msg.value("subscribe", true)) follow(job_id);
    } else if (type == "job_event") {
      std::string job_id = msg.at("job_id");
      daemon_.state(job_id);  // UnknownJob before the ack
      reply(msg, Json{{"job_id", job_id}});
      follow(job_id);
    } else if (type == "cancel_job") {
      std::string job_id = msg.at("job_id");
      daemon_.cancel(job_id);
      reply(msg, Json{{"job_id", job_id}});
    } else if (type == "list_history") {
      reply(msg, Json{{"history", daemon_.list_history()}});
    } else if (type == "register_plugin") {
      daemon_.plugins().register_plugin(msg, shared_from_this());
      reply(msg, Json{{"app_name", msg["app_name"]}});
    } else if (type == "plugin_result") {
      daemon_.plugins().on_result(msg);
    } else {
      throw Error(ErrorCode::Schema, "unknown message type '" + type + "'");
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  Daemon& daemon_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::atomic<bool> released_{false};
  std::mutex tokens_mu_;
  std::vector<std::uint64_t> tokens_;
};

}  // namespace

struct WireServer::Impl {
  Daemon& daemon;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::mutex mu;
  std::vector<std::weak_ptr<Session>> sessions;
  std::thread thread;
  bool stopped = false;

  explicit Impl(Daemon& d) : daemon(d) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto session = std::make_shared<Session>(std::move(socket), daemon);
      {
        std::lock_guard lock(mu);
        std::erase_if(sessions, [](const auto& w) { return w.expired(); });
        sessions.push_back(session);
      }
      session->start();
      accept();
    });
  }
};

WireServer::WireServer(Daemon& daemon, unsigned short port) : impl_(std::make_unique<Impl>(daemon)) {
  // Loopback only: the protocol has no authentication.
  tcp::endpoint endpoint(net::ip::make_address("127.0.0.1"), port);
  beast::error_code ec;
  impl_->acceptor.open(endpoint.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(endpoint, ec);
  if (!ec) impl_->acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot listen on 127.0.0.1:" + std::to_string(port) + ": " + ec.message());
  port_ = impl_->acceptor.local_endpoint().port();
  impl_->accept();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
  spdlog::info("wire/1 listening on 127.0.0.1:{}", port_);
}

WireServer::~WireServer() { stop(); }

void WireServer::stop() {
  if (impl_->stopped) return;
  impl_->stopped = true;
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  std::lock_guard lock(impl_->mu);
  for (auto& w : impl_->sessions)
    if (auto s = w.lock()) s->release();
}

}  // namespace smartpaste::daemon
