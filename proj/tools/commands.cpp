#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "ab3/arith.hpp"
#include "ab3/error.hpp"
#include "ab3/evaluation.hpp"
#include "ab3/session.hpp"
#include "ab3/tcp_transport.hpp"

namespace ab3::cli {

using nlohmann::json;

namespace {

Dataset load_data(const DataOptions& o) {
  require(o.path.empty() != o.synthetic.empty(), ErrorKind::kInvalidArgument,
          "give exactly one of --data or --synthetic");
  Dataset d;
  if (o.synthetic == "separable") d = make_separable(o.rows, o.features, o.synthetic_seed);
  else if (o.synthetic == "gse") d = make_gse_like(o.synthetic_seed);
  else if (o.synthetic == "imbalanced") d = make_imbalanced(o.synthetic_seed);
  else if (o.synthetic == "gaussian")
    d = make_gaussian_classes(o.rows, o.features, 0.5, 2.0, 0.0, o.synthetic_seed);
  else
    d = load_csv(o.path, CsvOptions{!o.no_header, o.label_column, !o.no_standardize});

  if (!o.columns_file.empty()) {
    auto sel = select_columns(d, read_names_file(o.columns_file));
    for (const auto& name : sel.missing)
      std::fprintf(stderr, "warning: column '%s' not found, skipped\n", name.c_str());
    d = std::move(sel.data);
  }
  return d;
}

TrainConfig load_train(const TrainOverrides& o) {
  TrainConfig c = o.config_path.empty() ? TrainConfig{} : TrainConfig::load(o.config_path);
  if (o.iterations) c.iterations = *o.iterations;
  if (o.batch_size) c.batch_size = *o.batch_size;
  if (o.sigmoid) c.sigmoid = parse_sigmoid_kind(*o.sigmoid);
  if (o.seed) c.seed = *o.seed;
  if (o.no_class_weighting) c.class_weighting = false;
  return c;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::kIo, "cannot write " + path);
  out << text << '\n';
}

json stats_json(const CommStats& s, std::size_t iterations) {
  return json::parse(stats_to_json(s, iterations));
}

}  // namespace

int run_party(const RunPartyOptions& o) {
  const PartyConfig pc = PartyConfig::load(o.config);
  const TrainConfig cfg = load_train(o.train);
  const PartitionMode mode = parse_partition_mode(o.partition);
  const RevealSet reveal_set = RevealSet::parse(o.reveal_to);
  const std::string id = std::to_string(pc.party_id);

  std::optional<Dataset> local;
  if (mode == PartitionMode::kHorizontal || pc.party_id == 0) local = load_data(o.data);

  auto net = TcpTransport::connect(pc);
  PartyOptions popts;
  popts.frac_bits = cfg.frac_bits;
  Party party(*net, pc.seed, popts);
  const SessionResult res = run_session(party, local ? &*local : nullptr, mode, cfg, reveal_set);

  if (res.weights) {
    write_file(o.model_out.empty() ? "model_p" + id + ".json" : o.model_out,
               model_to_json(*res.weights, cfg));
  } else {
    json shares{{"party_id", pc.party_id},
                {"frac_bits", cfg.frac_bits},
                {"shape", res.weight_shares.shape()},
                {"first", res.weight_shares.first.words()},
                {"second", res.weight_shares.second.words()}};
    write_file(o.shares_out.empty() ? "shares_p" + id + ".json" : o.shares_out, shares.dump(2));
  }
  json stats{{"party_id", pc.party_id},
             {"rows", res.rows},
             {"features", res.cols},
             {"training", stats_json(res.training, cfg.iterations)},
             {"total", stats_json(res.total, cfg.iterations)}};
  write_file(o.stats_out.empty() ? "stats_p" + id + ".json" : o.stats_out, stats.dump(2));
  std::printf("party %d done: %llu rounds, %llu bytes sent\n", pc.party_id,
              static_cast<unsigned long long>(res.total.rounds),
              static_cast<unsigned long long>(res.total.total_bytes()));
  return 0;
}

int simulate(const SimulateOptions& o) {
  const Dataset d = load_data(o.data);
  const TrainConfig cfg = load_train(o.train);
  SimulationSetup setup;
  setup.partition = parse_partition_mode(o.partition);
  setup.party_seed = o.party_seed;
  setup.session_id = o.session_id;
  if (o.real_latency) setup.real_latency_ms = o.wan_rtt_ms;

  const auto t0 = std::chrono::steady_clock::now();
  const SimulationResult r = simulate_training(d, cfg, setup);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto metrics = confusion(predict(r.weights, d.x, d.cols, cfg.sigmoid), d.y);
  const LatencyModel lan{o.lan_rtt_ms, o.lan_bandwidth_mbps};
  const LatencyModel wan{o.wan_rtt_ms, o.bandwidth_mbps};
  const double iters = static_cast<double>(std::max<std::size_t>(cfg.iterations, 1));
  const double lan_s = lan.modeled_seconds(r.training);
  const double wan_s = wan.modeled_seconds(r.training);

  if (!o.model_out.empty()) write_file(o.model_out, model_to_json(r.weights, cfg));
  if (!o.stats_out.empty()) {
    json stats{{"party_id", 0},
               {"rows", d.rows},
               {"features", d.cols},
               {"training", stats_json(r.training, cfg.iterations)},
               {"total", stats_json(r.stats[0], cfg.iterations)}};
    write_file(o.stats_out, stats.dump(2));
  }

  if (o.json) {
    json out{{"rows", d.rows},
             {"features", d.cols},
             {"iterations", cfg.iterations},
             {"sigmoid", std::string(to_string(cfg.sigmoid))},
             {"training_rounds", r.training.rounds},
             {"rounds_per_iteration", static_cast<double>(r.training.rounds) / iters},
             {"training_bytes", r.training.total_bytes()},
             {"bytes_per_iteration", static_cast<double>(r.training.total_bytes()) / iters},
             {"modeled_lan_seconds", lan_s},
             {"modeled_wan_seconds", wan_s},
             {"modeled_wan_iterations_per_second", iters / wan_s},
             {"wall_seconds", wall},
             {"train_balanced_accuracy", metrics.balanced_accuracy},
             {"weights", r.weights}};
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  std::printf("data               %zu x %zu (%zu positive)\n", d.rows, d.cols, d.positives());
  std::printf("sigmoid            %s\n", std::string(to_string(cfg.sigmoid)).c_str());
  std::printf("training steps     %zu\n", cfg.iterations);
  std::printf("rounds             %llu (%.2f per iteration)\n",
              static_cast<unsigned long long>(r.training.rounds),
              static_cast<double>(r.training.rounds) / iters);
  std::printf("bytes (party 0)    %llu (%.0f per iteration)\n",
              static_cast<unsigned long long>(r.training.total_bytes()),
              static_cast<double>(r.training.total_bytes()) / iters);
  std::printf("modeled LAN        %.4f s (%.2f it/s, rtt %.2f ms, %.0f Mbps)\n", lan_s,
              iters / lan_s, o.lan_rtt_ms, o.lan_bandwidth_mbps);
  std::printf("modeled WAN        %.4f s (%.2f it/s, rtt %.2f ms, %.0f Mbps)\n", wan_s,
              iters / wan_s, o.wan_rtt_ms, o.bandwidth_mbps);
  std::printf("wall clock         %.3f s\n", wall);
  if (metrics.tp + metrics.fn > 0 && metrics.tn + metrics.fp > 0)
    std::printf("balanced accuracy  %.4f (training set)\n", metrics.balanced_accuracy);
  return 0;
}

int bench(const BenchOptions& o) {
  require(o.iters >= 1, ErrorKind::kInvalidArgument, "--iters must be positive");
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    require(file.good(), ErrorKind::kIo, "cannot write " + o.out);
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  out << "features,batch,iterations,seconds,iterations_per_second,rounds_per_iteration,"
         "bytes_per_iteration\n";
  TrainConfig cfg;
  cfg.sigmoid = parse_sigmoid_kind(o.sigmoid);
  for (std::size_t f : o.features) {
    for (std::size_t b : o.batches) {
      const Dataset d = make_gaussian_classes(b, f, 0.5, 2.0, 0.0, 42);
      cfg.batch_size = b;
      struct Cell {
        double seconds = 0.0;
        CommStats stats;
      };
      PartySimConfig sim;
      sim.party.frac_bits = cfg.frac_bits;
      auto run = simulate_parties(
          [&](Party& p) {
            const SharedData data = share_dataset(p, &d, PartitionMode::kDealer);
            const auto cw = compute_class_weights(p, data.y);
            ModelState m = init_model(p, f, cfg);
            const auto before = p.net().stats();
            const auto t0 = std::chrono::steady_clock::now();
            for (std::size_t t = 0; t < o.iters; ++t)
              m = train_step(p, data.x, data.y, m, cfg, cw, d.rows);
            Cell c;
            c.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            c.stats = p.net().stats() - before;
            return c;
          },
          sim);
      const Cell& c = run.outputs[0];
      const double n = static_cast<double>(o.iters);
      char line[256];
      std::snprintf(line, sizeof line, "%zu,%zu,%zu,%.6f,%.4f,%.2f,%.1f\n", f, b, o.iters,
                    c.seconds, n / c.seconds, static_cast<double>(c.stats.rounds) / n,
                    static_cast<double>(c.stats.total_bytes()) / n);
      out << line << std::flush;
    }
  }
  return 0;
}

int sigmoid_table(const SigmoidTableOptions& o) {
  const auto rep = sigmoid_error_report(parse_sigmoid_kind(o.kind), o.from, o.to, o.step,
                                        o.frac_bits);
  std::ofstream file;
  if (o.out != "-") {
    file.open(o.out);
    require(file.good(), ErrorKind::kIo, "cannot write " + o.out);
  }
  std::ostream& out = o.out == "-" ? std::cout : file;
  out << "x,approx,true,error\n";
  char line[160];
  for (const auto& r : rep.rows) {
    std::snprintf(line, sizeof line, "%.6f,%.9f,%.9f,%.9f\n", r.x, r.approx, r.truth, r.error);
    out << line;
  }
  std::fprintf(stderr, "%s: %zu points, max |error| %.6f at x=%.4f, mean %.6f\n",
               std::string(to_string(rep.kind)).c_str(), rep.rows.size(), rep.max_abs_error,
               rep.argmax, rep.mean_abs_error);
  return 0;
}

int eval(const EvalOptions& o) {
  const Dataset d = load_data(o.data);
  const TrainConfig cfg = load_train(o.train);
  const CvReport rep = kfold_cv(d, o.folds, cfg, o.plaintext);
  std::printf("%zu-fold cross-validation, %s sigmoid, %zu iterations, %s trainer\n", o.folds,
              std::string(to_string(cfg.sigmoid)).c_str(), cfg.iterations,
              o.plaintext ? "plaintext" : "secure");
  std::printf("%s", rep.to_table().c_str());
  if (!o.json_out.empty()) write_file(o.json_out, rep.to_json());
  return 0;
}

}  // namespace ab3::cli
