#include "safefilter/teleop.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <memory>
#include <set>
#include <stdexcept>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace safefilter::teleop {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

constexpr std::size_t kMaxQueued = 256;

}  // namespace

struct Server::Impl
{
  struct Connection;

  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  net::steady_timer timer{ioc};
  Session session;
  std::chrono::nanoseconds period;
  std::chrono::steady_clock::time_point next;
  std::set<std::shared_ptr<Connection>> connections;
  std::shared_ptr<const std::string> scene_msg;
  std::atomic<long> ticks{0};
  std::atomic<long> clients{0};
  std::atomic<long> malformed{0};

  Impl(ScenarioSpec spec, double tick_hz)
  : session(std::move(spec)),
    period(std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double>(1.0 / tick_hz)))
  {
    scene_msg = std::make_shared<const std::string>(encode_scene(session.spec()));
  }

  void accept();
  void schedule();
  void broadcast(std::shared_ptr<const std::string> msg);
  void drop(const std::shared_ptr<Connection> & c);
};

struct Server::Impl::Connection : std::enable_shared_from_this<Connection>
{
  Impl & server;
  websocket::stream<beast::tcp_stream> ws;
  beast::flat_buffer buffer;
  std::deque<std::shared_ptr<const std::string>> queue;
  bool closed{false};

  Connection(Impl & s, tcp::socket socket) : server(s), ws(std::move(socket)) {}

  void start()
  {
    ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) {
        return;
      }
      self->ws.text(true);
      self->server.connections.insert(self);
      self->server.clients = static_cast<long>(self->server.connections.size());
      self->send(self->server.scene_msg);
      self->read();
    });
  }

  void read()
  {
    ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server.drop(self);
        return;
      }
      const std::string data = beast::buffers_to_string(self->buffer.data());
      self->buffer.consume(self->buffer.size());
      std::size_t pos = 0;
      while (pos < data.size()) {
        std::size_t end = data.find('\n', pos);
        if (end == std::string::npos) {
          end = data.size();
        }
        const std::string_view line(data.data() + pos, end - pos);
        if (!line.empty()) {
          self->server.session.submit_line(line);
        }
        pos = end + 1;
      }
      self->server.malformed = self->server.session.malformed();
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> msg)
  {
    if (closed) {
      return;
    }
    if (queue.size() >= kMaxQueued) {
      server.drop(shared_from_this());
      return;
    }
    queue.push_back(std::move(msg));
    if (queue.size() == 1) {
      write();
    }
  }

  void write()
  {
    ws.async_write(net::buffer(*queue.front()),
                   [self = shared_from_this()](beast::error_code ec, std::size_t) {
                     if (ec) {
                       self->server.drop(self);
                       return;
                     }
                     self->queue.pop_front();
                     if (!self->queue.empty() && !self->closed) {
                       self->write();
                     }
                   });
  }
};

void Server::Impl::accept()
{
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      return;
    }
    std::make_shared<Connection>(*this, std::move(socket))->start();
    accept();
  });
}

void Server::Impl::schedule()
{
  timer.expires_at(next);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) {
      return;
    }
    const StateMsg msg = session.tick();
    ++ticks;
    broadcast(std::make_shared<const std::string>(encode(msg)));
    next += period;
    const auto now = std::chrono::steady_clock::now();
    if (next + period < now) {
      next = now;
    }
    schedule();
  });
}

void Server::Impl::broadcast(std::shared_ptr<const std::string> msg)
{
  const auto snapshot = connections;
  for (const auto & c : snapshot) {
    c->send(msg);
  }
}

void Server::Impl::drop(const std::shared_ptr<Connection> & c)
{
  if (c->closed) {
    return;
  }
  c->closed = true;
  beast::error_code ignored;
  beast::get_lowest_layer(c->ws).socket().close(ignored);
  connections.erase(c);
  clients = static_cast<long>(connections.size());
}

Server::Server(ScenarioSpec spec, unsigned short port, double tick_hz)
{
  if (!(tick_hz > 0.0)) {
    throw std::invalid_argument("teleop: tick_hz must be > 0");
  }
  spec.dt = 1.0 / tick_hz;
  impl_ = std::make_unique<Impl>(std::move(spec), tick_hz);
  try {
    const tcp::endpoint ep(net::ip::make_address("127.0.0.1"), port);
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen(net::socket_base::max_listen_connections);
  } catch (const boost::system::system_error & e) {
    throw std::runtime_error("teleop: cannot listen on port " + std::to_string(port) + ": " +
                             e.code().message());
  }
}

Server::~Server() = default;

unsigned short Server::port() const
{
  return impl_->acceptor.local_endpoint().port();
}

void Server::run()
{
  impl_->accept();
  impl_->next = std::chrono::steady_clock::now() + impl_->period;
  impl_->schedule();
  impl_->ioc.run();
}

void Server::stop()
{
  impl_->ioc.stop();
}

long Server::ticks() const
{
  return impl_->ticks;
}

long Server::clients() const
{
  return impl_->clients;
}

long Server::malformed() const
{
  return impl_->malformed;
}

}  // namespace safefilter::teleop
