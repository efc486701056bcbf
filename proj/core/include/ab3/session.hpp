#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ab3/dataset.hpp"
#include "ab3/party.hpp"
#include "ab3/trainer.hpp"

namespace ab3 {

// dealer: party 0 holds and shares the whole dataset.
// horizontal: each party holds a block of rows; blocks are stacked in party
// order (0, 1, 2).
enum class PartitionMode { kDealer, kHorizontal };

PartitionMode parse_partition_mode(std::string_view s);
std::string_view to_string(PartitionMode m);

// Which parties learn the trained weights.
struct RevealSet {
  std::array<bool, kNumParties> to{true, true, true};

  bool none() const { return !to[0] && !to[1] && !to[2]; }
  bool all() const { return to[0] && to[1] && to[2]; }
  /// "all", "none", or a comma list of party ids such as "0,2".
  static RevealSet parse(std::string_view s);
};

/// Contiguous row blocks for horizontal partitioning: sizes differ by at
/// most one, earlier parties taking the remainder.
std::array<Dataset, kNumParties> split_horizontal(const Dataset& d);

struct SharedData {
  ArithShare x;  // N x f fixed-point
  ArithShare y;  // N x 1 unscaled {0,1}
};

/// Shares the local rows. `local` is the party's own block (horizontal) or
/// the full dataset on party 0 (dealer; ignored elsewhere, may be null).
/// Row and column counts are exchanged first as control messages (1 round);
/// a column count disagreement is kShapeMismatch.
SharedData share_dataset(Party& p, const Dataset* local, PartitionMode mode);

struct SessionResult {
  std::optional<std::vector<double>> weights;  // set on parties in the reveal set
  ArithShare weight_shares;
  std::optional<ClassWeights> class_weights;
  std::size_t rows = 0;
  std::size_t cols = 0;
  CommStats training;  // inside train()
  CommStats total;     // everything this party sent, setup included
};

SessionResult run_session(Party& p, const Dataset* local, PartitionMode mode,
                          const TrainConfig& cfg, const RevealSet& reveal_set);

struct SimulationSetup {
  PartitionMode partition = PartitionMode::kDealer;
  std::uint64_t party_seed = 1000;  // party i uses party_seed + i
  std::uint64_t session_id = 1;
  double real_latency_ms = 0.0;
  bool verify_reveals = false;
  ShareAuditor* auditor = nullptr;
};

struct SimulationResult {
  std::vector<double> weights;
  std::optional<ClassWeights> class_weights;
  std::array<CommStats, kNumParties> stats;  // per party, whole session
  CommStats training;                        // party 0, train() only
};

/// Whole training session in the in-process simulator; weights revealed to
/// all parties.
SimulationResult simulate_training(const Dataset& d, const TrainConfig& cfg,
                                   const SimulationSetup& setup = {});

// JSON documents written by the CLI.
std::string stats_to_json(const CommStats& s, std::size_t iterations);
std::string model_to_json(const std::vector<double>& w, const TrainConfig& cfg);
std::vector<double> weights_from_model_json(const std::string& text);

}  // namespace ab3
