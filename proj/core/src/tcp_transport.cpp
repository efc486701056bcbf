#include "ab3/tcp_transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "ab3/error.hpp"
#include "json.hpp"

namespace ab3 {

using Clock = std::chrono::steady_clock;

PartyConfig PartyConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("party config: ") + e.what());
  }
  PartyConfig c;
  try {
    c.party_id = j.at("party_id").get<int>();
    const auto peers = j.at("peers").get<std::vector<std::string>>();
    require(peers.size() == kNumParties, ErrorKind::kParse, "party config needs exactly 3 peers");
    for (int i = 0; i < kNumParties; ++i) c.peers[i] = peers[i];
    c.session_id = j.at("session_id").get<std::uint64_t>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.connect_timeout_ms = j.value("connect_timeout_ms", 5000);
    c.io_timeout_ms = j.value("io_timeout_ms", 120000);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("party config: ") + e.what());
  }
  require(PartyId(c.party_id).valid(), ErrorKind::kParse, "party_id must be 0, 1 or 2");
  return c;
}

PartyConfig PartyConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string PartyConfig::to_json() const {
  nlohmann::json j;
  j["party_id"] = party_id;
  j["peers"] = std::vector<std::string>(peers.begin(), peers.end());
  j["session_id"] = session_id;
  j["seed"] = seed;
  j["connect_timeout_ms"] = connect_timeout_ms;
  j["io_timeout_ms"] = io_timeout_ms;
  return j.dump(2);
}

HostPort HostPort::parse(const std::string& s) {
  const auto colon = s.rfind(':');
  require(colon != std::string::npos && colon + 1 < s.size(), ErrorKind::kParse,
          "expected host:port, got '" + s + "'");
  HostPort hp;
  hp.host = s.substr(0, colon);
  try {
    hp.port = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    fail(ErrorKind::kParse, "bad port in '" + s + "'");
  }
  require(hp.port > 0 && hp.port < 65536, ErrorKind::kParse, "port out of range in '" + s + "'");
  return hp;
}

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  int release() { return std::exchange(fd_, -1); }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

int remaining_ms(Clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

void wait_fd(int fd, short events, Clock::time_point deadline, const char* what) {
  for (;;) {
    pollfd p{fd, events, 0};
    const int ms = remaining_ms(deadline);
    if (ms == 0) fail(ErrorKind::kTimeout, std::string(what) + " timed out");
    const int r = ::poll(&p, 1, ms);
    if (r > 0) return;
    if (r == 0) fail(ErrorKind::kTimeout, std::string(what) + " timed out");
    if (errno != EINTR) fail(ErrorKind::kConnection, std::string("poll: ") + std::strerror(errno));
  }
}

void read_exact(int fd, std::uint8_t* buf, std::size_t n, Clock::time_point deadline) {
  std::size_t got = 0;
  while (got < n) {
    wait_fd(fd, POLLIN, deadline, "receive");
    const ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) fail(ErrorKind::kConnection, "peer closed the connection");
    if (r < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      fail(ErrorKind::kConnection, std::string("recv: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(r);
  }
}

void write_all(int fd, const std::uint8_t* buf, std::size_t n, Clock::time_point deadline) {
  std::size_t sent = 0;
  while (sent < n) {
    wait_fd(fd, POLLOUT, deadline, "send");
    const ssize_t r = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      fail(ErrorKind::kConnection, std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(r);
  }
}

std::vector<std::uint8_t> read_frame(int fd, Clock::time_point deadline) {
  std::vector<std::uint8_t> frame(kWireHeaderSize);
  read_exact(fd, frame.data(), kWireHeaderSize, deadline);
  const auto h = decode_header(std::span<const std::uint8_t, kWireHeaderSize>(frame.data(),
                                                                              kWireHeaderSize));
  frame.resize(kWireHeaderSize + h.payload_len);
  read_exact(fd, frame.data() + kWireHeaderSize, h.payload_len, deadline);
  return frame;
}

sockaddr_in resolve(const HostPort& hp) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(hp.host.c_str(), nullptr, &hints, &res);
  require(rc == 0 && res, ErrorKind::kConnection,
          "cannot resolve " + hp.host + ": " + ::gai_strerror(rc));
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(static_cast<std::uint16_t>(hp.port));
  return addr;
}

void tune(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

Fd listen_on(const HostPort& hp) {
  Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
  require(fd.get() >= 0, ErrorKind::kConnection, "socket() failed");
  int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = resolve(hp);
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    fail(ErrorKind::kConnection,
         "bind " + hp.host + ":" + std::to_string(hp.port) + ": " + std::strerror(errno));
  require(::listen(fd.get(), 4) == 0, ErrorKind::kConnection, "listen() failed");
  return fd;
}

Fd dial(const HostPort& hp, Clock::time_point deadline) {
  const sockaddr_in addr = resolve(hp);
  for (;;) {
    Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
    require(fd.get() >= 0, ErrorKind::kConnection, "socket() failed");
    if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
      tune(fd.get());
      return fd;
    }
    if (remaining_ms(deadline) == 0)
      fail(ErrorKind::kTimeout,
           "could not reach " + hp.host + ":" + std::to_string(hp.port) + " before deadline");
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

std::vector<std::uint8_t> hello_frame(std::uint64_t session_id, int party_id) {
  WireMessage m;
  m.header.msg_type = MsgType::kControl;
  m.header.session_id = session_id;
  m.header.sequence = 0;
  m.payload = {static_cast<std::uint8_t>(party_id)};
  m.header.payload_len = 1;
  return serialize(m);
}

// Reads a hello and returns the announced party id after validating it.
int check_hello(const std::vector<std::uint8_t>& frame, std::uint64_t session_id) {
  const WireMessage m = deserialize(frame);
  require(m.header.version == kWireVersion, ErrorKind::kHandshake,
          "peer speaks wire version " + std::to_string(m.header.version) + ", expected " +
              std::to_string(kWireVersion));
  require(m.header.msg_type == MsgType::kControl && m.payload.size() == 1,
          ErrorKind::kHandshake, "malformed hello");
  require(m.header.session_id == session_id, ErrorKind::kHandshake,
          "peer is in session " + std::to_string(m.header.session_id) + ", expected " +
              std::to_string(session_id));
  return m.payload[0];
}

}  // namespace

struct TcpTransport::Link {
  Fd fd;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::vector<std::uint8_t>> outbox;
  bool closing = false;
  std::exception_ptr error;
  std::thread writer;
};

TcpTransport::TcpTransport(PartyId self, std::uint64_t session_id, int io_timeout_ms)
    : Transport(self, session_id), io_timeout_ms_(io_timeout_ms) {}

std::unique_ptr<TcpTransport> TcpTransport::connect(const PartyConfig& config) {
  const PartyId self(config.party_id);
  require(self.valid(), ErrorKind::kInvalidArgument, "party_id must be 0, 1 or 2");
  std::set<std::string> distinct(config.peers.begin(), config.peers.end());
  require(distinct.size() == kNumParties, ErrorKind::kInvalidArgument,
          "peer addresses must be distinct");

  const auto deadline = Clock::now() + std::chrono::milliseconds(config.connect_timeout_ms);
  std::unique_ptr<TcpTransport> t(
      new TcpTransport(self, config.session_id, config.io_timeout_ms));
  std::array<Fd, kNumParties> fds;

  // Listen first so lower-id dialers find us as early as possible.
  Fd listener;
  if (self.value() < kNumParties - 1) listener = listen_on(HostPort::parse(config.peers[self.value()]));

  for (int peer = 0; peer < self.value(); ++peer) {
    Fd fd = dial(HostPort::parse(config.peers[peer]), deadline);
    auto hello = hello_frame(config.session_id, self.value());
    write_all(fd.get(), hello.data(), hello.size(), deadline);
    const int announced = check_hello(read_frame(fd.get(), deadline), config.session_id);
    require(announced == peer, ErrorKind::kHandshake,
            "dialed party " + std::to_string(peer) + " but it announced " +
                std::to_string(announced));
    fds[peer] = std::move(fd);
  }

  for (int accepted = 0; accepted < kNumParties - 1 - self.value();) {
    wait_fd(listener.get(), POLLIN, deadline, "accept");
    Fd fd(::accept(listener.get(), nullptr, nullptr));
    if (fd.get() < 0) continue;
    tune(fd.get());
    const auto theirs = read_frame(fd.get(), deadline);
    // Answer before validating so a mismatched dialer sees the mismatch too.
    auto hello = hello_frame(config.session_id, self.value());
    write_all(fd.get(), hello.data(), hello.size(), deadline);
    const int announced = check_hello(theirs, config.session_id);
    require(announced > self.value() && announced < kNumParties, ErrorKind::kHandshake,
            "unexpected party id " + std::to_string(announced));
    require(fds[announced].get() < 0, ErrorKind::kHandshake,
            "duplicate party id " + std::to_string(announced));
    fds[announced] = std::move(fd);
    ++accepted;
  }

  for (int peer = 0; peer < kNumParties; ++peer)
    if (peer != self.value()) t->start_writer(peer, fds[peer].release());
  return t;
}

void TcpTransport::start_writer(int peer, int fd) {
  links_[peer] = std::make_unique<Link>();
  Link& link = *links_[peer];
  link.fd = Fd(fd);
  link.writer = std::thread([this, &link] {
    for (;;) {
      std::vector<std::uint8_t> frame;
      {
        std::unique_lock lk(link.mu);
        link.cv.wait(lk, [&] { return link.closing || !link.outbox.empty(); });
        if (link.outbox.empty()) return;
        frame = std::move(link.outbox.front());
        link.outbox.pop_front();
      }
      try {
        const auto deadline = Clock::now() + std::chrono::milliseconds(io_timeout_ms_);
        write_all(link.fd.get(), frame.data(), frame.size(), deadline);
      } catch (...) {
        std::lock_guard lk(link.mu);
        link.error = std::current_exception();
        link.outbox.clear();
        return;
      }
    }
  });
}

void TcpTransport::check_writer(int peer) {
  Link& link = *links_[peer];
  std::lock_guard lk(link.mu);
  if (link.error) std::rethrow_exception(link.error);
}

TcpTransport::~TcpTransport() {
  for (auto& link : links_) {
    if (!link) continue;
    {
      std::lock_guard lk(link->mu);
      link->closing = true;
    }
    link->cv.notify_all();
    if (link->writer.joinable()) link->writer.join();
    ::shutdown(link->fd.get(), SHUT_WR);
  }
}

void TcpTransport::send_frame(PartyId peer, std::vector<std::uint8_t> frame) {
  check_writer(peer.value());
  Link& link = *links_[peer.value()];
  {
    std::lock_guard lk(link.mu);
    link.outbox.push_back(std::move(frame));
  }
  link.cv.notify_one();
}

std::vector<std::uint8_t> TcpTransport::recv_frame(PartyId peer) {
  check_writer(peer.value());
  const auto deadline = Clock::now() + std::chrono::milliseconds(io_timeout_ms_);
  return read_frame(links_[peer.value()]->fd.get(), deadline);
}

}  // namespace ab3
