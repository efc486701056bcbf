#include "ab3/session.hpp"

#include <cstring>

#include <json.hpp>

#include "ab3/arith.hpp"
#include "ab3/error.hpp"

namespace ab3 {

using nlohmann::json;

namespace {

std::vector<std::uint8_t> pack_dims(std::uint64_t rows, std::uint64_t cols) {
  std::vector<std::uint8_t> b(16);
  for (int k = 0; k < 8; ++k) {
    b[k] = static_cast<std::uint8_t>(rows >> (8 * k));
    b[8 + k] = static_cast<std::uint8_t>(cols >> (8 * k));
  }
  return b;
}

std::pair<std::size_t, std::size_t> unpack_dims(const std::vector<std::uint8_t>& b) {
  require(b.size() == 16, ErrorKind::kProtocolDesync, "bad dataset metadata message");
  std::uint64_t rows = 0, cols = 0;
  for (int k = 0; k < 8; ++k) {
    rows |= std::uint64_t{b[k]} << (8 * k);
    cols |= std::uint64_t{b[8 + k]} << (8 * k);
  }
  return {rows, cols};
}

ArithShare stack_rows(const std::vector<ArithShare>& blocks, std::size_t rows, std::size_t cols,
                      bool scaled) {
  std::vector<RingTensor> f, s;
  for (const auto& b : blocks) {
    f.push_back(b.first);
    s.push_back(b.second);
  }
  ArithShare out{concat(f).reshaped(Shape{rows, cols}), concat(s).reshaped(Shape{rows, cols})};
  out.set_scaled(scaled);
  return out;
}

}  // namespace

PartitionMode parse_partition_mode(std::string_view s) {
  if (s == "dealer") return PartitionMode::kDealer;
  if (s == "horizontal") return PartitionMode::kHorizontal;
  fail(ErrorKind::kParse, "unknown partition mode '" + std::string(s) + "'");
}

std::string_view to_string(PartitionMode m) {
  return m == PartitionMode::kDealer ? "dealer" : "horizontal";
}

RevealSet RevealSet::parse(std::string_view s) {
  RevealSet r;
  if (s == "all") return r;
  r.to = {false, false, false};
  if (s == "none") return r;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto item = s.substr(pos, comma == std::string_view::npos ? s.size() - pos : comma - pos);
    require(item == "0" || item == "1" || item == "2", ErrorKind::kParse,
            "reveal-to expects all, none or party ids, got '" + std::string(s) + "'");
    r.to[static_cast<std::size_t>(item[0] - '0')] = true;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return r;
}

std::array<Dataset, kNumParties> split_horizontal(const Dataset& d) {
  std::array<Dataset, kNumParties> parts;
  std::size_t begin = 0;
  for (int i = 0; i < kNumParties; ++i) {
    const std::size_t len = d.rows / kNumParties + (static_cast<std::size_t>(i) < d.rows % kNumParties ? 1 : 0);
    parts[static_cast<std::size_t>(i)] = d.slice(begin, begin + len);
    begin += len;
  }
  return parts;
}

SharedData share_dataset(Party& p, const Dataset* local, PartitionMode mode) {
  const PartyId me = p.id();
  const bool holds_data = mode == PartitionMode::kHorizontal || me == PartyId(0);
  require(!holds_data || local != nullptr, ErrorKind::kInvalidArgument,
          "party " + std::to_string(me.value()) + " needs local data in " +
              std::string(to_string(mode)) + " mode");

  std::array<std::pair<std::size_t, std::size_t>, kNumParties> dims{};
  if (holds_data) {
    dims[static_cast<std::size_t>(me.value())] = {local->rows, local->cols};
    const auto msg = pack_dims(local->rows, local->cols);
    p.net().send_control(me.next(), msg);
    p.net().send_control(me.prev(), msg);
  }
  for (const PartyId peer : {me.next(), me.prev()})
    if (mode == PartitionMode::kHorizontal || peer == PartyId(0))
      dims[static_cast<std::size_t>(peer.value())] = unpack_dims(p.net().recv_control(peer));
  p.net().barrier_round();

  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> owners;
  for (int i = 0; i < kNumParties; ++i) {
    const auto [r, c] = dims[static_cast<std::size_t>(i)];
    if (mode == PartitionMode::kDealer && i != 0) continue;
    if (owners.empty()) cols = c;
    require(c == cols, ErrorKind::kShapeMismatch,
            "parties disagree on the feature count: " + std::to_string(c) + " vs " +
                std::to_string(cols));
    rows += r;
    if (r > 0) owners.push_back(i);
  }
  require(rows > 0 && cols > 0, ErrorKind::kInvalidArgument, "shared dataset is empty");

  std::vector<ArithShare> xs, ys;
  for (int owner : owners) {
    const auto [r, c] = dims[static_cast<std::size_t>(owner)];
    RingTensor xin(Shape{r, c}, true);
    RingTensor yin(Shape{r, 1});
    if (owner == me.value()) {
      xin = local->encode_features(p.codec());
      yin = local->label_tensor();
    }
    xs.push_back(share(p, PartyId(owner), xin));
    ys.push_back(share(p, PartyId(owner), yin));
  }
  return {stack_rows(xs, rows, cols, true), stack_rows(ys, rows, 1, false)};
}

SessionResult run_session(Party& p, const Dataset* local, PartitionMode mode,
                          const TrainConfig& cfg, const RevealSet& reveal_set) {
  SessionResult res;
  const SharedData data = share_dataset(p, local, mode);
  res.rows = data.x.shape()[0];
  res.cols = data.x.shape()[1];
  TrainResult tr = train(p, data.x, data.y, cfg);
  res.training = tr.stats;
  res.class_weights = tr.class_weights;
  res.weight_shares = tr.model.w;

  if (reveal_set.all()) {
    res.weights = reveal(p, tr.model.w).decode(p.codec());
  } else {
    for (int i = 0; i < kNumParties; ++i) {
      if (!reveal_set.to[static_cast<std::size_t>(i)]) continue;
      auto w = reveal_to(p, tr.model.w, PartyId(i));
      if (w) res.weights = w->decode(p.codec());
    }
  }
  res.total = p.net().stats();
  return res;
}

SimulationResult simulate_training(const Dataset& d, const TrainConfig& cfg,
                                   const SimulationSetup& setup) {
  PartySimConfig sim;
  for (int i = 0; i < kNumParties; ++i)
    sim.seeds[static_cast<std::size_t>(i)] = setup.party_seed + static_cast<std::uint64_t>(i);
  sim.party.frac_bits = cfg.frac_bits;
  sim.party.verify_reveals = setup.verify_reveals;
  sim.party.auditor = setup.auditor;
  sim.sim.session_id = setup.session_id;
  sim.sim.real_latency_ms = setup.real_latency_ms;

  std::array<Dataset, kNumParties> blocks;
  if (setup.partition == PartitionMode::kHorizontal) blocks = split_horizontal(d);

  auto run = simulate_parties(
      [&](Party& p) {
        const Dataset* local = setup.partition == PartitionMode::kHorizontal
                                   ? &blocks[static_cast<std::size_t>(p.id().value())]
                                   : (p.id() == PartyId(0) ? &d : nullptr);
        return run_session(p, local, setup.partition, cfg, RevealSet{});
      },
      sim);

  SimulationResult out;
  out.weights = *run.outputs[0].weights;
  out.class_weights = run.outputs[0].class_weights;
  out.training = run.outputs[0].training;
  out.stats = run.stats;
  return out;
}

std::string stats_to_json(const CommStats& s, std::size_t iterations) {
  json j{{"rounds", s.rounds},
         {"bytes_sent", s.bytes_sent},
         {"messages", s.messages},
         {"total_bytes", s.total_bytes()},
         {"total_messages", s.total_messages()},
         {"iterations", iterations}};
  return j.dump(2);
}

std::string model_to_json(const std::vector<double>& w, const TrainConfig& cfg) {
  json j{{"frac_bits", cfg.frac_bits},
         {"features", w.size()},
         {"iterations", cfg.iterations},
         {"sigmoid", cfg.sigmoid == SigmoidKind::kThreePiece ? 3 : 5},
         {"weights", w}};
  return j.dump(2);
}

std::vector<double> weights_from_model_json(const std::string& text) {
  try {
    return json::parse(text).at("weights").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("model json: ") + e.what());
  }
}

}  // namespace ab3
