#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <random>
#include <thread>

#include "ab3/error.hpp"
#include "ab3/memory_transport.hpp"
#include "ab3/tcp_transport.hpp"
#include "testing.hpp"

namespace ab3 {
namespace {

using testing::kind_of;

using testing::free_port;

std::array<PartyConfig, 3> local_configs(std::uint64_t session = 17) {
  std::array<std::string, 3> peers;
  for (auto& p : peers) p = "127.0.0.1:" + std::to_string(free_port());
  std::array<PartyConfig, 3> cfgs;
  for (int i = 0; i < 3; ++i) {
    cfgs[i].party_id = i;
    cfgs[i].peers = peers;
    cfgs[i].session_id = session;
    cfgs[i].seed = 42 + static_cast<std::uint64_t>(i);
    cfgs[i].connect_timeout_ms = 5000;
    cfgs[i].io_timeout_ms = 5000;
  }
  return cfgs;
}

TEST(PartyIdTest, RingIndexArithmetic) {
  EXPECT_EQ(PartyId(0).next(), PartyId(1));
  EXPECT_EQ(PartyId(2).next(), PartyId(0));
  EXPECT_EQ(PartyId(0).prev(), PartyId(2));
  EXPECT_EQ(PartyId(1).prev(), PartyId(0));
  EXPECT_FALSE(PartyId(3).valid());
}

TEST(Wire, HeaderLayoutIsBitExact) {
  const u64 words[] = {0x0102030405060708ULL};
  const auto frame = serialize(WireMessage::tensor(0x1122334455667788ULL, 5, words));
  ASSERT_EQ(frame.size(), kWireHeaderSize + 8);
  EXPECT_EQ(frame[0], 'A');
  EXPECT_EQ(frame[1], 'B');
  EXPECT_EQ(frame[2], '3');
  EXPECT_EQ(frame[3], 0);
  EXPECT_EQ(frame[4], 1);  // version
  EXPECT_EQ(frame[5], 0);  // tensor
  EXPECT_EQ(frame[6], 0);
  EXPECT_EQ(frame[7], 0);
  EXPECT_EQ(frame[8], 0x88);  // session, little-endian
  EXPECT_EQ(frame[15], 0x11);
  EXPECT_EQ(frame[16], 5);  // sequence
  EXPECT_EQ(frame[24], 8);  // payload_len
  EXPECT_EQ(frame[28], 0x08);  // first word, little-endian
  EXPECT_EQ(frame[35], 0x01);
}

TEST(Wire, SerializeDeserializeIsIdentity) {
  std::mt19937_64 gen(9);
  for (int i = 0; i < 200; ++i) {
    WireMessage m;
    if (i % 3 == 0) {
      m.header.msg_type = MsgType::kControl;
      m.payload.resize(gen() % 40);
      for (auto& b : m.payload) b = static_cast<std::uint8_t>(gen());
      m.header.session_id = gen();
      m.header.sequence = gen();
      m.header.payload_len = static_cast<std::uint32_t>(m.payload.size());
    } else {
      std::vector<u64> w(gen() % 50);
      for (auto& x : w) x = gen();
      m = WireMessage::tensor(gen(), gen(), w);
      EXPECT_EQ(m.words(), w);
    }
    EXPECT_EQ(deserialize(serialize(m)), m);
  }
}

TEST(Wire, MalformedFramesAreFramingErrors) {
  const u64 words[] = {1, 2};
  const auto good = serialize(WireMessage::tensor(1, 0, words));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(kind_of([&] { deserialize(bad_magic); }), ErrorKind::kFraming);
  auto reserved = good;
  reserved[6] = 1;
  EXPECT_EQ(kind_of([&] { deserialize(reserved); }), ErrorKind::kFraming);
  auto truncated = good;
  truncated.pop_back();
  EXPECT_EQ(kind_of([&] { deserialize(truncated); }), ErrorKind::kFraming);
  auto unaligned = good;
  unaligned[24] = 7;
  unaligned.resize(kWireHeaderSize + 7);
  EXPECT_EQ(kind_of([&] { deserialize(unaligned); }), ErrorKind::kFraming);
}

TEST(Simulator, SendReceiveAndAccounting) {
  const auto stats = run_simulation({
      [](Transport& t) {
        t.send_tensor(PartyId(1), RingTensor::vector({1, 2, 3}));
        t.send_tensor(PartyId(2), RingTensor(Shape{0}));
        t.barrier_round();
      },
      [](Transport& t) {
        EXPECT_EQ(t.recv_tensor(PartyId(0), {3}), RingTensor::vector({1, 2, 3}));
        t.barrier_round();
      },
      [](Transport& t) {
        EXPECT_EQ(t.recv_tensor(PartyId(0), {0}).size(), 0u);
        t.barrier_round();
      },
  });
  EXPECT_EQ(stats[0].rounds, 1u);
  EXPECT_EQ(stats[0].bytes_sent[1], kWireHeaderSize + 24);
  EXPECT_EQ(stats[0].bytes_sent[2], kWireHeaderSize);
  EXPECT_EQ(stats[0].messages[1], 1u);
  EXPECT_EQ(stats[1].total_bytes(), 0u);
}

TEST(Simulator, BarrierWithoutTrafficCountsOneRound) {
  const auto stats = run_simulation([](Transport& t) { t.barrier_round(); });
  for (const auto& s : stats) {
    EXPECT_EQ(s.rounds, 1u);
    EXPECT_EQ(s.total_bytes(), 0u);
  }
}

TEST(Simulator, IndependentSendsShareOneRound) {
  const auto stats = run_simulation([](Transport& t) {
    const PartyId me = t.self();
    t.send_tensor(me.next(), RingTensor::vector({1}));
    t.send_tensor(me.next(), RingTensor::vector({2}));
    t.recv_tensor(me.prev(), {1});
    t.recv_tensor(me.prev(), {1});
    t.barrier_round();
  });
  EXPECT_EQ(stats[0].rounds, 1u);
  EXPECT_EQ(stats[0].messages[1], 2u);
}

TEST(Simulator, ShapeMismatchIsFramingError) {
  const ErrorKind k = kind_of([] {
    run_simulation({
        [](Transport& t) { t.send_tensor(PartyId(1), RingTensor::vector({1, 2, 3})); },
        [](Transport& t) { t.recv_tensor(PartyId(0), {2, 2}); },
        [](Transport&) {},
    });
  });
  EXPECT_EQ(k, ErrorKind::kFraming);
}

TEST(Simulator, DeadlockIsProtocolDesync) {
  const ErrorKind k = kind_of([] {
    run_simulation([](Transport& t) { t.recv_tensor(t.self().next(), {1}); });
  });
  EXPECT_EQ(k, ErrorKind::kProtocolDesync);
}

TEST(Simulator, MismatchedProgramsAreDesync) {
  // Party 0 multiplies twice, the others once: leftover traffic.
  const ErrorKind leftover = kind_of([] {
    run_simulation({
        [](Transport& t) {
          t.send_tensor(PartyId(1), RingTensor::vector({1}));
          t.send_tensor(PartyId(1), RingTensor::vector({2}));
        },
        [](Transport& t) { t.recv_tensor(PartyId(0), {1}); },
        [](Transport&) {},
    });
  });
  EXPECT_EQ(leftover, ErrorKind::kProtocolDesync);
  // Control frame where a tensor is expected.
  const ErrorKind wrong_type = kind_of([] {
    run_simulation({
        [](Transport& t) {
          const std::uint8_t b[] = {1};
          t.send_control(PartyId(1), b);
        },
        [](Transport& t) { t.recv_tensor(PartyId(0), {0}); },
        [](Transport&) {},
    });
  });
  EXPECT_EQ(wrong_type, ErrorKind::kProtocolDesync);
}

// Party 0 sends one frame that the test edits before party 1 reads it.
ErrorKind tampered_kind(const std::function<void(std::vector<std::uint8_t>&)>& edit) {
  InMemoryNetwork* net = nullptr;
  std::atomic<bool> ready{false};
  SimulationOptions opts;
  opts.on_start = [&](InMemoryNetwork& n) { net = &n; };
  return kind_of([&] {
    run_simulation(
        {
            [&](Transport& t) {
              t.send_tensor(PartyId(1), RingTensor::vector({7}));
              net->tamper(PartyId(0), PartyId(1), edit);
              ready = true;
            },
            [&](Transport& t) {
              while (!ready) std::this_thread::yield();
              t.recv_tensor(PartyId(0), {1});
            },
            [](Transport&) {},
        },
        opts);
  });
}

TEST(Simulator, HeaderChecksOnReceive) {
  EXPECT_EQ(tampered_kind([](auto& f) { f[4] = 2; }), ErrorKind::kHandshake);
  EXPECT_EQ(tampered_kind([](auto& f) { f[8] ^= 1; }), ErrorKind::kHandshake);
  EXPECT_EQ(tampered_kind([](auto& f) { f[16] = 3; }), ErrorKind::kProtocolDesync);
  EXPECT_EQ(tampered_kind([](auto& f) { f[0] = 'Z'; }), ErrorKind::kFraming);
}

TEST(Simulator, RealLatencySleepsPerRound) {
  SimulationOptions opts;
  opts.real_latency_ms = 20;
  const auto t0 = std::chrono::steady_clock::now();
  run_simulation(
      [](Transport& t) {
        for (int i = 0; i < 3; ++i) t.barrier_round();
      },
      opts);
  EXPECT_GE(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(60));
}

TEST(Latency, ModeledTime) {
  CommStats s;
  s.rounds = 100;
  EXPECT_NEAR(LatencyModel::wan().modeled_seconds(s), 5.0, 1e-12);
  EXPECT_NEAR(LatencyModel::lan().modeled_seconds(s), 0.05, 1e-12);
  // 100 Mbps moves 12.5 MB per second.
  EXPECT_NEAR(LatencyModel::wan().modeled_seconds(0, 12'500'000), 1.0, 1e-12);
  s.bytes_sent = {0, 1000, 0};
  EXPECT_GT(LatencyModel::wan().modeled_seconds(s), LatencyModel::lan().modeled_seconds(s));
}

TEST(PartyConfigTest, JsonRoundTripAndErrors) {
  const auto c = PartyConfig::from_json(
      R"({"party_id": 1, "peers": ["a:1","b:2","c:3"], "session_id": 17, "seed": 42,
          "connect_timeout_ms": 250})");
  EXPECT_EQ(c.party_id, 1);
  EXPECT_EQ(c.peers[2], "c:3");
  EXPECT_EQ(c.session_id, 17u);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.connect_timeout_ms, 250);
  const auto back = PartyConfig::from_json(c.to_json());
  EXPECT_EQ(back.peers, c.peers);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(kind_of([] { PartyConfig::from_json(R"({"party_id": 3, "peers": ["a:1","b:2","c:3"], "session_id": 1})"); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { PartyConfig::from_json(R"({"party_id": 0, "peers": ["a:1"], "session_id": 1})"); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { PartyConfig::from_json("not json"); }), ErrorKind::kParse);
  EXPECT_EQ(HostPort::parse("127.0.0.1:9000").port, 9000);
  EXPECT_THROW(HostPort::parse("nohost"), Error);
  EXPECT_THROW(HostPort::parse("h:99999"), Error);
}

TEST(Tcp, MeshExchangesTensorsAndMatchesSimulatorStats) {
  auto cfgs = local_configs();
  std::array<CommStats, 3> tcp_stats;
  std::array<std::exception_ptr, 3> errors;
  auto program = [](Transport& t) {
    const PartyId me = t.self();
    t.send_tensor(me.next(), RingTensor::vector({static_cast<u64>(me.value()), 99}));
    const RingTensor got = t.recv_tensor(me.prev(), {2});
    EXPECT_EQ(got[0], static_cast<u64>(me.prev().value()));
    t.barrier_round();
    std::vector<u64> big(100000, static_cast<u64>(me.value()));
    t.send_tensor(me.prev(), RingTensor(Shape{big.size()}, big));
    t.send_tensor(me.next(), RingTensor(Shape{big.size()}, big));
    EXPECT_EQ(t.recv_tensor(me.next(), {big.size()})[5], static_cast<u64>(me.next().value()));
    EXPECT_EQ(t.recv_tensor(me.prev(), {big.size()})[5], static_cast<u64>(me.prev().value()));
    t.barrier_round();
  };
  std::vector<std::thread> threads;
  for (int i = 0; i < 3; ++i)
    threads.emplace_back([&, i] {
      try {
        auto t = TcpTransport::connect(cfgs[i]);
        program(*t);
        tcp_stats[i] = t->stats();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  SimulationOptions opts;
  opts.session_id = 17;
  const auto sim_stats = run_simulation(program, opts);
  EXPECT_EQ(tcp_stats, sim_stats);
}

TEST(Tcp, WrongSessionIsHandshakeError) {
  auto cfgs = local_configs();
  cfgs[1].session_id = 18;
  std::array<std::optional<ErrorKind>, 3> kinds;
  std::vector<std::thread> threads;
  for (int i = 0; i < 3; ++i) {
    cfgs[i].connect_timeout_ms = 2000;
    threads.emplace_back([&, i] {
      try {
        auto t = TcpTransport::connect(cfgs[i]);
      } catch (const Error& e) {
        kinds[i] = e.kind();
      }
    });
  }
  for (auto& t : threads) t.join();
  // Party 1 dials party 0 and both see the mismatch.
  ASSERT_TRUE(kinds[0] && kinds[1]);
  EXPECT_EQ(*kinds[0], ErrorKind::kHandshake);
  EXPECT_EQ(*kinds[1], ErrorKind::kHandshake);
}

TEST(Tcp, UnreachablePeerTimesOut) {
  auto cfgs = local_configs();
  cfgs[2].connect_timeout_ms = 300;
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(kind_of([&] { TcpTransport::connect(cfgs[2]); }), ErrorKind::kTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(3));
}

TEST(Tcp, PeerWithOtherVersionIsHandshakeError) {
  auto cfgs = local_configs();
  const int port = HostPort::parse(cfgs[0].peers[0]).port;
  // A fake party 0 that answers every hello with a version 2 hello.
  const int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
  int one = 1;
  ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  ASSERT_EQ(::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  ASSERT_EQ(::listen(lfd, 1), 0);
  std::thread fake([&] {
    const int fd = ::accept(lfd, nullptr, nullptr);
    std::vector<std::uint8_t> buf(kWireHeaderSize + 1);
    std::size_t got = 0;
    while (got < buf.size()) {
      const ssize_t r = ::recv(fd, buf.data() + got, buf.size() - got, 0);
      if (r <= 0) break;
      got += static_cast<std::size_t>(r);
    }
    WireMessage m;
    m.header.version = 2;
    m.header.msg_type = MsgType::kControl;
    m.header.session_id = 17;
    m.payload = {0};
    m.header.payload_len = 1;
    const auto frame = serialize(m);
    ::send(fd, frame.data(), frame.size(), MSG_NOSIGNAL);
    ::close(fd);
  });
  cfgs[1].connect_timeout_ms = 2000;
  // Party 1 dials 0 first; the version check fails before it ever waits for 2.
  EXPECT_EQ(kind_of([&] { TcpTransport::connect(cfgs[1]); }), ErrorKind::kHandshake);
  fake.join();
  ::close(lfd);
}

}  // namespace
}  // namespace ab3
