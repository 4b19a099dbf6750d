#include "smartpaste/daemon.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace smartpaste::daemon {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct WireClient::Impl {
  net::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{ioc};
  beast::flat_buffer buffer;
  std::deque<std::string> outbox;  // touched on the io thread only
  std::thread thread;

  mutable std::mutex mu;
  std::condition_variable cv;
  std::deque<Json> inbox;
  bool closed = false;
  bool frozen = false;
  std::uint64_t next_request = 1;

  void read_next() {
    ws.async_read(buffer, [this](beast::error_code ec, std::size_t) {
      std::lock_guard lock(mu);
      if (ec) {
        if (!frozen) closed = true;
        cv.notify_all();
        return;
      }
      try {
        inbox.push_back(Json::parse(beast::buffers_to_string(buffer.data())));
      } catch (const Json::parse_error&) {
        // not ours to fix; drop the frame
      }
      buffer.consume(buffer.size());
      cv.notify_all();
      if (!frozen) {
        net::post(ioc, [this] { read_next(); });
      }
    });
  }

  void write_next() {
    ws.async_write(net::buffer(outbox.front()), [this](beast::error_code ec, std::size_t) {
      if (ec) {
        std::lock_guard lock(mu);
        closed = true;
        cv.notify_all();
        return;
      }
      outbox.pop_front();
      if (!outbox.empty()) write_next();
    });
  }
};

WireClient::WireClient(const std::string& host, unsigned short port) : impl_(std::make_unique<Impl>()) {
  try {
    tcp::resolver resolver(impl_->ioc);
    auto results = resolver.resolve(host, std::to_string(port));
    beast::get_lowest_layer(impl_->ws).expires_after(std::chrono::seconds(5));
    beast::get_lowest_layer(impl_->ws).connect(results);
    beast::get_lowest_layer(impl_->ws).expires_never();
    impl_->ws.handshake(host + ":" + std::to_string(port), "/");
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::Io, "cannot connect to " + host + ":" + std::to_string(port) + ": " + e.what());
  }
  impl_->ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::client));
  impl_->ws.text(true);
  impl_->read_next();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

WireClient::~WireClient() {
  close();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void WireClient::send(Json msg) {
  msg["v"] = std::string(kWireVersion);
  net::post(impl_->ioc, [impl = impl_.get(), text = msg.dump()]() mutable {
    impl->outbox.push_back(std::move(text));
    if (impl->outbox.size() == 1) impl->write_next();
  });
}

std::optional<Json> WireClient::receive(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait_for(lock, timeout, [&] { return !impl_->inbox.empty() || impl_->closed; });
  if (!impl_->inbox.empty()) {
    Json j = std::move(impl_->inbox.front());
    impl_->inbox.pop_front();
    return j;
  }
  if (impl_->closed) throw Error(ErrorCode::Io, "wire connection closed");
  return std::nullopt;
}

Json WireClient::request(Json msg, std::chrono::milliseconds timeout) {
  std::string id;
  {
    std::lock_guard lock(impl_->mu);
    id = "r-" + std::to_string(impl_->next_request++);
  }
  msg["request_id"] = id;
  send(std::move(msg));
  std::unique_lock lock(impl_->mu);
  std::optional<Json> found;
  auto match = [&] {
    for (auto it = impl_->inbox.begin(); it != impl_->inbox.end(); ++it)
      if (it->value("request_id", std::string()) == id) {
        found = std::move(*it);
        impl_->inbox.erase(it);
        return true;
      }
    return impl_->closed;
  };
  impl_->cv.wait_for(lock, timeout, match);
  if (found) return *found;
  if (impl_->closed) throw Error(ErrorCode::Io, "wire connection closed before the reply");
  throw Error(ErrorCode::Io, "no reply to " + msg.value("type", std::string("request")) + " in time");
}

void WireClient::close() {
  net::post(impl_->ioc, [impl = impl_.get()] {
    beast::error_code ec;
    beast::get_lowest_layer(impl->ws).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(impl->ws).socket().close(ec);
  });
  std::lock_guard lock(impl_->mu);
  impl_->closed = true;
  impl_->cv.notify_all();
}

void WireClient::freeze() {
  {
    std::lock_guard lock(impl_->mu);
    impl_->frozen = true;
  }
  // With no read in flight, pings go unanswered while the socket stays open.
  net::post(impl_->ioc, [impl = impl_.get()] { beast::get_lowest_layer(impl->ws).cancel(); });
}

bool WireClient::closed() const {
  std::lock_guard lock(impl_->mu);
  return impl_->closed;
}

// --- echo plugin -----------------------------------------------------------------------------

EchoPlugin::EchoPlugin(const std::string& host, unsigned short port, std::string app_name,
                       std::vector<std::string> apis, std::chrono::milliseconds delay)
    : client_(std::make_unique<WireClient>(host, port)), delay_(delay) {
  Json caps = Json::array();
  for (const auto& api : apis)
    caps.push_back(Json{{"api_name", api}, {"description", "echoes its arguments"}});
  reply_ = client_->request(Json{{"type", "register_plugin"}, {"app_name", app_name}, {"capabilities", caps}});
  loop_ = std::thread([this] {
    while (!stop_) {
      std::optional<Json> msg;
      try {
        msg = client_->receive(std::chrono::milliseconds(50));
      } catch (const Error&) {
        return;
      }
      if (!msg || msg->value("type", std::string()) != "plugin_call") continue;
      for (auto waited = std::chrono::milliseconds(0); waited < delay_ && !stop_;
           waited += std::chrono::milliseconds(10))
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      if (stop_) return;
      ++calls_;
      client_->send(Json{{"type", "plugin_result"},
                         {"call_id", (*msg)["call_id"]},
                         {"ok", true},
                         {"result", (*msg)["args"]}});
    }
  });
}

EchoPlugin::~EchoPlugin() { stop(); }

void EchoPlugin::stop() {
  stop_ = true;
  if (loop_.joinable()) loop_.join();
  client_->close();
}

}  // namespace smartpaste::daemon
