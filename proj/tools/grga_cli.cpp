// Experiment front end: paired GRGA vs baseline Monte Carlo runs, report
// emission from RGGR snapshots, and aggregate verification.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "grga/experiment.hpp"

namespace {

struct cli_overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> pop;
  std::optional<int> generations;
  std::optional<double> mutation_rate;
  std::optional<int> mc_runs;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<int> stall;
};

void add_common_flags(CLI::App* cmd, cli_overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override");
  cmd->add_option("--seed", o.seed, "base seed for paired runs");
  cmd->add_option("--pop", o.pop, "population size");
  cmd->add_option("--generations", o.generations, "generation cap");
  cmd->add_option("--mutation-rate", o.mutation_rate,
                  "per-individual mutation probability");
  cmd->add_option("--mc-runs", o.mc_runs, "number of Monte Carlo runs");
  cmd->add_option("--jobs", o.jobs, "parallel worker count");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--mode", o.mode, "grga, baseline, or both");
  cmd->add_option("--stall", o.stall, "stall generations before termination");
}

grga::experiment_config apply_overrides(grga::experiment_config cfg,
                                        const cli_overrides& o) {
  if (!o.config_path.empty())
    cfg = grga::experiment_config_from_json(grga::load_json(o.config_path),
                                            std::move(cfg));
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.pop) cfg.ga.population_size = *o.pop;
  if (o.generations) cfg.ga.max_generations = *o.generations;
  if (o.mutation_rate) cfg.ga.mutation_rate = *o.mutation_rate;
  if (o.mc_runs) cfg.mc_runs = *o.mc_runs;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.out) cfg.output_dir = *o.out;
  if (o.mode) cfg.mode = grga::experiment_mode_from_string(*o.mode);
  if (o.stall) cfg.ga.stall_generations = *o.stall;
  return cfg;
}

void print_summary(const grga::comparison_summary& summary,
                   const std::string& out_dir) {
  auto report = [](const char* name,
                   const std::optional<grga::algo_aggregate>& agg) {
    if (!agg) return;
    std::cout << name << ": mean final best " << agg->mean_final_best
              << ", mean termination generation "
              << agg->mean_termination_generation << '\n';
  };
  report("grga", summary.grga);
  report("baseline", summary.baseline);
  if (summary.grga && summary.baseline) {
    std::cout << "win rate (grga over paired seeds): " << summary.win_rate
              << '\n';
    if (summary.crossover_generation >= 0)
      std::cout << "grga mean average fitness first exceeds baseline at "
                   "generation "
                << summary.crossover_generation << '\n';
    else
      std::cout << "grga mean average fitness never exceeds baseline\n";
  }
  std::cout << "reports written to " << out_dir << '\n';
}

// Writes to the given file, or stdout when the path is empty or "-".
void emit_to(const std::string& path,
             const std::function<void(std::ostream&)>& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw grga::io_error("cannot write file: " + path);
  writer(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gene-regulatory genetic algorithm experiment runner"};
  app.require_subcommand(1);

  // --- bench ---------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "run a benchmark comparison");
  bench->require_subcommand(1);
  auto* bench_shubert =
      bench->add_subcommand("shubert", "paired runs on the Shubert function");
  cli_overrides shubert_flags;
  add_common_flags(bench_shubert, shubert_flags);
  int shubert_bins = 60, shubert_dims = 3;
  double shubert_lo = -10.0, shubert_hi = 10.0;
  std::string shubert_oracle_out;
  bench_shubert->add_option("--bins", shubert_bins, "bins per dimension");
  bench_shubert->add_option("--dims", shubert_dims, "dimensions");
  bench_shubert->add_option("--lo", shubert_lo, "lower bound");
  bench_shubert->add_option("--hi", shubert_hi, "upper bound");
  bench_shubert->add_option(
      "--oracle-out", shubert_oracle_out,
      "also write the exhaustive grid optimum and quantiles as JSON");

  // --- featsel ---------------------------------------------------------------
  auto* featsel =
      app.add_subcommand("featsel", "feature selection on a CSV dataset");
  cli_overrides featsel_flags;
  add_common_flags(featsel, featsel_flags);
  std::string featsel_data, featsel_label = "label";
  double featsel_penalty = 0.001;
  int featsel_folds = 5;
  featsel->add_option("--data", featsel_data, "dataset CSV path");
  featsel->add_option("--label", featsel_label, "label column name");
  featsel->add_option("--penalty", featsel_penalty,
                      "fitness penalty per selected feature");
  featsel->add_option("--folds", featsel_folds, "cross-validation folds");

  // --- report ------------------------------------------------------------------
  auto* report = app.add_subcommand("report", "emit CSVs from RGGR snapshots");
  report->require_subcommand(1);

  auto* heatmap = report->add_subcommand(
      "heatmap", "top-k weights per column from a snapshot");
  std::string heatmap_snapshot, heatmap_out;
  int heatmap_top = 5;
  bool heatmap_decode = false;
  double heatmap_lo = -10.0, heatmap_hi = 10.0;
  heatmap->add_option("--snapshot", heatmap_snapshot, "RGGR snapshot JSON")
      ->required();
  heatmap->add_option("--top", heatmap_top, "edges per column");
  heatmap->add_option("--out", heatmap_out, "output CSV (default stdout)");
  heatmap->add_flag("--decode", heatmap_decode,
                    "append decoded bin values (uniform box)");
  heatmap->add_option("--lo", heatmap_lo, "decode lower bound");
  heatmap->add_option("--hi", heatmap_hi, "decode upper bound");

  auto* slice = report->add_subcommand(
      "slice", "sweep x3 for the heaviest (x1,x2) pairs of a snapshot");
  std::string slice_snapshot, slice_out;
  int slice_pairs = 5;
  double slice_lo = -10.0, slice_hi = 10.0;
  slice->add_option("--snapshot", slice_snapshot, "RGGR snapshot JSON")
      ->required();
  slice->add_option("--pairs", slice_pairs, "number of (x1,x2) pairs");
  slice->add_option("--out", slice_out, "output CSV (default stdout)");
  slice->add_option("--lo", slice_lo, "decode lower bound");
  slice->add_option("--hi", slice_hi, "decode upper bound");

  // --- verify ---------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "consistency checks on outputs");
  verify->require_subcommand(1);
  auto* verify_aggregate_cmd = verify->add_subcommand(
      "aggregate", "recompute aggregate.csv from run CSVs and compare");
  std::string verify_dir;
  verify_aggregate_cmd->add_option("--dir", verify_dir, "experiment output dir")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench_shubert->parsed()) {
      grga::experiment_config cfg;
      cfg.problem = grga::problem_kind::shubert;
      cfg.box = {shubert_dims, shubert_lo, shubert_hi, shubert_bins};
      cfg.mc_runs = 1;
      cfg = apply_overrides(std::move(cfg), shubert_flags);
      if (bench_shubert->count("--bins")) cfg.box.bins = shubert_bins;
      if (bench_shubert->count("--dims")) cfg.box.dims = shubert_dims;
      if (bench_shubert->count("--lo")) cfg.box.lo = shubert_lo;
      if (bench_shubert->count("--hi")) cfg.box.hi = shubert_hi;
      const auto summary = grga::run_experiment(cfg);
      if (!shubert_oracle_out.empty())
        grga::save_json(grga::grid_result_to_json(grga::grid_oracle(cfg.box)),
                        shubert_oracle_out);
      print_summary(summary, cfg.output_dir);
    } else if (featsel->parsed()) {
      grga::experiment_config cfg;
      cfg.problem = grga::problem_kind::featsel;
      cfg.label_column = featsel_label;
      cfg.penalty = featsel_penalty;
      cfg.folds = featsel_folds;
      cfg.mc_runs = 1;
      cfg.dataset_path = featsel_data;
      cfg = apply_overrides(std::move(cfg), featsel_flags);
      if (featsel->count("--data")) cfg.dataset_path = featsel_data;
      if (featsel->count("--label")) cfg.label_column = featsel_label;
      if (featsel->count("--penalty")) cfg.penalty = featsel_penalty;
      if (featsel->count("--folds")) cfg.folds = featsel_folds;
      const auto summary = grga::run_experiment(cfg);
      print_summary(summary, cfg.output_dir);
    } else if (heatmap->parsed()) {
      const grga::rggr graph =
          grga::rggr_from_json(grga::load_json(heatmap_snapshot));
      std::optional<grga::discretized_box> box;
      if (heatmap_decode)
        box = grga::discretized_box{graph.space().num_loci(), heatmap_lo,
                                    heatmap_hi,
                                    graph.space().alphabet_size(0)};
      emit_to(heatmap_out, [&](std::ostream& out) {
        grga::emit_heatmap(graph, heatmap_top, box, out);
      });
    } else if (slice->parsed()) {
      const grga::rggr graph =
          grga::rggr_from_json(grga::load_json(slice_snapshot));
      const grga::discretized_box box{3, slice_lo, slice_hi,
                                      graph.space().alphabet_size(0)};
      emit_to(slice_out, [&](std::ostream& out) {
        grga::emit_fixed_slice(graph, box, slice_pairs, out);
      });
    } else if (verify_aggregate_cmd->parsed()) {
      const int checked = grga::verify_aggregate(verify_dir);
      std::cout << "aggregate.csv matches recomputation from " << checked
                << " run CSVs\n";
    }
  } catch (const grga::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const grga::io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const grga::run_error& e) {
    std::cerr << "run error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
