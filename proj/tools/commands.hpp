#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ab3::cli {

// Where the plaintext rows come from: a CSV file or a built-in generator.
struct DataOptions {
  std::string path;
  bool no_header = false;
  std::string label_column = "last";
  bool no_standardize = false;
  std::string columns_file;
  std::string synthetic;  // separable | gse | imbalanced | gaussian
  std::uint64_t synthetic_seed = 1;
  std::size_t rows = 200;
  std::size_t features = 10;
};

// Command-line overrides applied on top of --train-config.
struct TrainOverrides {
  std::string config_path;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> batch_size;
  std::optional<std::string> sigmoid;
  std::optional<std::uint64_t> seed;
  bool no_class_weighting = false;
};

struct RunPartyOptions {
  std::string config;
  DataOptions data;
  TrainOverrides train;
  std::string partition = "horizontal";
  std::string reveal_to = "all";
  std::string model_out;
  std::string stats_out;
  std::string shares_out;
};

struct SimulateOptions {
  DataOptions data;
  TrainOverrides train;
  std::string partition = "horizontal";
  double lan_rtt_ms = 0.5;
  double lan_bandwidth_mbps = 1000.0;
  double wan_rtt_ms = 50.0;
  double bandwidth_mbps = 100.0;
  bool real_latency = false;
  std::uint64_t party_seed = 1000;
  std::uint64_t session_id = 1;
  std::string model_out;
  std::string stats_out;
  bool json = false;
};

struct BenchOptions {
  std::vector<std::size_t> features{64, 1024, 4096, 16384};
  std::vector<std::size_t> batches{64, 128, 256};
  std::size_t iters = 5;
  std::string sigmoid = "5";
  std::string out;
};

struct SigmoidTableOptions {
  std::string kind = "5";
  double from = -8.0;
  double to = 8.0;
  double step = 0.001;
  int frac_bits = 16;
  std::string out = "-";
};

struct EvalOptions {
  DataOptions data;
  TrainOverrides train;
  std::size_t folds = 10;
  bool plaintext = false;
  std::string json_out;
};

int run_party(const RunPartyOptions& o);
int simulate(const SimulateOptions& o);
int bench(const BenchOptions& o);
int sigmoid_table(const SigmoidTableOptions& o);
int eval(const EvalOptions& o);

}  // namespace ab3::cli
