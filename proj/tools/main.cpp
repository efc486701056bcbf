#include <cstdio>

#include <CLI11.hpp>

#include "ab3/error.hpp"
#include "commands.hpp"

namespace {

void add_data_options(CLI::App* cmd, ab3::cli::DataOptions& d) {
  cmd->add_option("--data", d.path, "CSV file, label in the last column unless --label-column");
  cmd->add_flag("--no-header", d.no_header, "CSV has no header row");
  cmd->add_option("--label-column", d.label_column, "last, first, or a header name");
  cmd->add_flag("--no-standardize", d.no_standardize, "skip per-column z-scoring");
  cmd->add_option("--columns", d.columns_file, "file with feature names to keep, one per line");
  cmd->add_option("--synthetic", d.synthetic, "generate data instead of --data")
      ->check(CLI::IsMember({"separable", "gse", "imbalanced", "gaussian"}));
  cmd->add_option("--synthetic-seed", d.synthetic_seed, "generator seed");
  cmd->add_option("--rows", d.rows, "rows for separable/gaussian");
  cmd->add_option("--features", d.features, "features for separable/gaussian");
}

void add_train_options(CLI::App* cmd, ab3::cli::TrainOverrides& t) {
  cmd->add_option("--train-config", t.config_path, "train config JSON");
  cmd->add_option("--iterations", t.iterations, "override iterations");
  cmd->add_option("--batch-size", t.batch_size, "override batch size");
  cmd->add_option("--sigmoid", t.sigmoid, "override sigmoid kind (3 or 5)");
  cmd->add_option("--seed", t.seed, "override the public training seed");
  cmd->add_flag("--no-class-weighting", t.no_class_weighting, "disable class weights");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3-party replicated secret sharing: secure logistic regression"};
  app.require_subcommand(1);

  ab3::cli::RunPartyOptions run;
  auto* run_cmd = app.add_subcommand("run-party", "run one party over TCP");
  run_cmd->add_option("--config", run.config, "party config JSON")->required();
  add_data_options(run_cmd, run.data);
  add_train_options(run_cmd, run.train);
  run_cmd->add_option("--partition", run.partition, "horizontal or dealer")
      ->check(CLI::IsMember({"horizontal", "dealer"}));
  run_cmd->add_option("--reveal-to", run.reveal_to, "all, none, or party ids like 0,2");
  run_cmd->add_option("--model-out", run.model_out, "model JSON path (default model_p<id>.json)");
  run_cmd->add_option("--stats-out", run.stats_out, "stats JSON path (default stats_p<id>.json)");
  run_cmd->add_option("--shares-out", run.shares_out,
                      "weight shares JSON path when the weights are not revealed to this party "
                      "(default shares_p<id>.json)");

  ab3::cli::SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "run all three parties in-process");
  add_data_options(sim_cmd, sim.data);
  add_train_options(sim_cmd, sim.train);
  sim_cmd->add_option("--partition", sim.partition, "horizontal or dealer")
      ->check(CLI::IsMember({"horizontal", "dealer"}));
  sim_cmd->add_option("--lan-rtt-ms", sim.lan_rtt_ms, "LAN round-trip time");
  sim_cmd->add_option("--lan-bandwidth-mbps", sim.lan_bandwidth_mbps, "LAN bandwidth");
  sim_cmd->add_option("--wan-rtt-ms", sim.wan_rtt_ms, "WAN round-trip time");
  sim_cmd->add_option("--bandwidth-mbps", sim.bandwidth_mbps, "WAN bandwidth");
  sim_cmd->add_flag("--real-latency", sim.real_latency, "sleep one WAN RTT per round");
  sim_cmd->add_option("--party-seed", sim.party_seed, "party i uses this + i");
  sim_cmd->add_option("--session-id", sim.session_id, "session id");
  sim_cmd->add_option("--model-out", sim.model_out, "write revealed model JSON");
  sim_cmd->add_option("--stats-out", sim.stats_out, "write party 0 stats JSON");
  sim_cmd->add_flag("--json", sim.json, "print the summary as JSON");

  ab3::cli::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "training throughput over a feature/batch grid");
  bench_cmd->add_option("--features", bench.features, "feature counts")->delimiter(',');
  bench_cmd->add_option("--batch", bench.batches, "batch sizes")->delimiter(',');
  bench_cmd->add_option("--iters", bench.iters, "timed iterations per cell");
  bench_cmd->add_option("--sigmoid", bench.sigmoid, "3 or 5");
  bench_cmd->add_option("--out", bench.out, "CSV path (default stdout)");

  ab3::cli::SigmoidTableOptions table;
  auto* table_cmd = app.add_subcommand("sigmoid-table", "secure sigmoid vs logistic on a grid");
  table_cmd->add_option("--kind", table.kind, "3 or 5");
  table_cmd->add_option("--from", table.from, "grid start");
  table_cmd->add_option("--to", table.to, "grid end");
  table_cmd->add_option("--step", table.step, "grid step");
  table_cmd->add_option("--frac-bits", table.frac_bits, "fixed-point fractional bits");
  table_cmd->add_option("--out", table.out, "CSV path, - for stdout");

  ab3::cli::EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "stratified k-fold cross-validation");
  add_data_options(eval_cmd, ev.data);
  add_train_options(eval_cmd, ev.train);
  eval_cmd->add_option("--folds", ev.folds, "number of folds");
  eval_cmd->add_flag("--plaintext", ev.plaintext, "train with the plaintext oracle instead");
  eval_cmd->add_option("--json", ev.json_out, "write the report as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return ab3::cli::run_party(run);
    if (*sim_cmd) return ab3::cli::simulate(sim);
    if (*bench_cmd) return ab3::cli::bench(bench);
    if (*table_cmd) return ab3::cli::sigmoid_table(table);
    if (*eval_cmd) return ab3::cli::eval(ev);
  } catch (const ab3::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
