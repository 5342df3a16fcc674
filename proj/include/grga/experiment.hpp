#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grga/benchmarks.hpp"
#include "grga/engine.hpp"
#include "grga/errors.hpp"
#include "grga/featsel.hpp"
#include "grga/io.hpp"

namespace grga {

enum class problem_kind { shubert, featsel, custom };
enum class experiment_mode { grga_only, baseline_only, both };

// Everything one Monte Carlo comparison needs: the problem, the shared GA
// parameters, the number of paired runs, and where the reports go.
struct experiment_config {
  problem_kind problem = problem_kind::shubert;

  discretized_box box{};  // shubert

  std::string dataset_path;  // featsel
  std::string label_column = "label";
  double penalty = 0.001;
  int folds = 5;

  // Programmatic problems; not reachable from config files.
  std::optional<gene_space> custom_space;
  fitness_function custom_fitness;

  ga_config ga{};
  update_params update{};
  strength_params strength{};

  int mc_runs = 1;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  int jobs = 1;
  experiment_mode mode = experiment_mode::both;

  void validate() const {
    if (mc_runs < 1) throw config_error("experiment: mc_runs must be >= 1");
    if (jobs < 1) throw config_error("experiment: jobs must be >= 1");
    if (output_dir.empty())
      throw config_error("experiment: output_dir must be set");
    ga.validate();
    update.validate();
    strength.validate();
    switch (problem) {
      case problem_kind::shubert:
        box.validate();
        break;
      case problem_kind::featsel:
        if (dataset_path.empty())
          throw config_error("experiment: featsel needs a dataset path");
        break;
      case problem_kind::custom:
        if (!custom_space || !custom_fitness)
          throw config_error(
              "experiment: custom problems need a space and a fitness");
        break;
    }
  }
};

// --- config (de)serialization ----------------------------------------------

inline nlohmann::json ga_config_to_json(const ga_config& c) {
  nlohmann::json j{
      {"population_size", c.population_size},
      {"mutation_rate", c.mutation_rate},
      {"crossover_rate", c.crossover_rate},
      {"max_generations", c.max_generations},
      {"stall_generations", c.stall_generations},
      {"elitism_count", c.elitism_count},
      {"seed", c.seed},
      {"mode", algo_name(c.mode)},
      {"mutation_endpoint",
       c.mutate_end == mutation_endpoint::downstream ? "downstream"
                                                     : "upstream"},
  };
  if (c.selection == selection_scheme::tournament)
    j["selection"] = {{"type", "tournament"}, {"size", c.tournament_size}};
  else
    j["selection"] = {{"type", "roulette_wheel"}};
  return j;
}

inline nlohmann::json update_params_to_json(const update_params& p) {
  nlohmann::json v;
  if (p.v.type == v_function::kind::constant)
    v = {{"type", "constant"}, {"c", p.v.c}};
  else
    v = {{"type", "saturating"}, {"c", p.v.c}, {"alpha", p.v.alpha}};
  return nlohmann::json{{"lambda", p.lambda},
                        {"rho_fraction", p.rho_fraction},
                        {"rho_min", p.rho_min},
                        {"mu", p.mu},
                        {"v", std::move(v)},
                        {"first_column_damping", p.first_column_damping}};
}

inline nlohmann::json strength_params_to_json(const strength_params& p) {
  return nlohmann::json{{"c1", p.c1}, {"c2", p.c2}};
}

namespace detail {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline ga_config ga_config_from_json(const nlohmann::json& j, ga_config base = {}) {
  detail::read_if(j, "population_size", base.population_size);
  detail::read_if(j, "mutation_rate", base.mutation_rate);
  detail::read_if(j, "crossover_rate", base.crossover_rate);
  detail::read_if(j, "max_generations", base.max_generations);
  detail::read_if(j, "stall_generations", base.stall_generations);
  detail::read_if(j, "elitism_count", base.elitism_count);
  detail::read_if(j, "seed", base.seed);
  if (j.contains("mutation_endpoint")) {
    const auto name = j.at("mutation_endpoint").get<std::string>();
    if (name == "downstream")
      base.mutate_end = mutation_endpoint::downstream;
    else if (name == "upstream")
      base.mutate_end = mutation_endpoint::upstream;
    else
      throw config_error("config: unknown mutation_endpoint '" + name + "'");
  }
  if (j.contains("selection")) {
    const auto& sel = j.at("selection");
    const auto type = sel.at("type").get<std::string>();
    if (type == "tournament") {
      base.selection = selection_scheme::tournament;
      if (sel.contains("size")) base.tournament_size = sel.at("size").get<int>();
    } else if (type == "roulette_wheel") {
      base.selection = selection_scheme::roulette_wheel;
    } else {
      throw config_error("config: unknown selection type '" + type + "'");
    }
  }
  return base;
}

inline update_params update_params_from_json(const nlohmann::json& j,
                                             update_params base = {}) {
  detail::read_if(j, "lambda", base.lambda);
  detail::read_if(j, "rho_fraction", base.rho_fraction);
  detail::read_if(j, "rho_min", base.rho_min);
  detail::read_if(j, "mu", base.mu);
  detail::read_if(j, "first_column_damping", base.first_column_damping);
  if (j.contains("v")) {
    const auto& v = j.at("v");
    const auto type = v.at("type").get<std::string>();
    if (type == "constant") {
      base.v = v_function::constant(v.value("c", 1.0));
    } else if (type == "saturating") {
      base.v = v_function::saturating(v.value("c", 1.0), v.value("alpha", 0.1));
    } else {
      throw config_error("config: unknown v function '" + type + "'");
    }
  }
  return base;
}

inline experiment_mode experiment_mode_from_string(const std::string& name) {
  if (name == "grga") return experiment_mode::grga_only;
  if (name == "baseline") return experiment_mode::baseline_only;
  if (name == "both") return experiment_mode::both;
  throw config_error("config: unknown mode '" + name +
                     "' (expected grga, baseline, or both)");
}

inline const char* experiment_mode_name(experiment_mode mode) {
  switch (mode) {
    case experiment_mode::grga_only: return "grga";
    case experiment_mode::baseline_only: return "baseline";
    default: return "both";
  }
}

// Parse a config file.  Unknown keys are ignored; CLI flags are applied on
// top by the caller.
inline experiment_config experiment_config_from_json(const nlohmann::json& j,
                                                     experiment_config base = {}) {
  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    const auto type = p.at("type").get<std::string>();
    if (type == "shubert") {
      base.problem = problem_kind::shubert;
      detail::read_if(p, "dims", base.box.dims);
      detail::read_if(p, "lo", base.box.lo);
      detail::read_if(p, "hi", base.box.hi);
      detail::read_if(p, "bins", base.box.bins);
    } else if (type == "featsel") {
      base.problem = problem_kind::featsel;
      detail::read_if(p, "dataset", base.dataset_path);
      detail::read_if(p, "label", base.label_column);
      detail::read_if(p, "penalty", base.penalty);
      detail::read_if(p, "folds", base.folds);
    } else {
      throw config_error("config: unknown problem type '" + type + "'");
    }
  }
  if (j.contains("ga")) base.ga = ga_config_from_json(j.at("ga"), base.ga);
  if (j.contains("update"))
    base.update = update_params_from_json(j.at("update"), base.update);
  if (j.contains("strength")) {
    detail::read_if(j.at("strength"), "c1", base.strength.c1);
    detail::read_if(j.at("strength"), "c2", base.strength.c2);
  }
  detail::read_if(j, "mc_runs", base.mc_runs);
  detail::read_if(j, "base_seed", base.base_seed);
  detail::read_if(j, "output_dir", base.output_dir);
  detail::read_if(j, "jobs", base.jobs);
  if (j.contains("mode"))
    base.mode = experiment_mode_from_string(j.at("mode").get<std::string>());
  return base;
}

// --- aggregation ------------------------------------------------------------

// Per-generation statistics over the runs of one algorithm.  Runs that
// terminated early simply stop contributing; counts record how many runs
// reached each generation.
struct algo_aggregate {
  std::vector<int> counts;
  std::vector<double> mean_best;
  std::vector<double> std_best;
  std::vector<double> mean_avg;
  std::vector<double> std_avg;
  double mean_final_best = 0.0;
  double mean_termination_generation = 0.0;
};

struct comparison_summary {
  std::optional<algo_aggregate> grga;
  std::optional<algo_aggregate> baseline;
  // Share of paired seeds whose GRGA run ends with strictly better best
  // fitness; ties count half.
  double win_rate = 0.0;
  // First generation at which GRGA's mean average fitness exceeds the
  // baseline's, or -1 if it never does.
  int crossover_generation = -1;
};

namespace detail {

inline algo_aggregate aggregate_runs(const std::vector<run_record>& runs) {
  algo_aggregate agg;
  std::size_t max_rows = 0;
  for (const run_record& r : runs) max_rows = std::max(max_rows, r.rows.size());
  agg.counts.assign(max_rows, 0);
  agg.mean_best.assign(max_rows, 0.0);
  agg.std_best.assign(max_rows, 0.0);
  agg.mean_avg.assign(max_rows, 0.0);
  agg.std_avg.assign(max_rows, 0.0);

  for (std::size_t g = 0; g < max_rows; ++g) {
    double sum_best = 0.0, sum_avg = 0.0;
    int n = 0;
    for (const run_record& r : runs)
      if (g < r.rows.size()) {
        sum_best += r.rows[g].best_fitness;
        sum_avg += r.rows[g].avg_fitness;
        ++n;
      }
    agg.counts[g] = n;
    agg.mean_best[g] = sum_best / n;
    agg.mean_avg[g] = sum_avg / n;
    double var_best = 0.0, var_avg = 0.0;
    for (const run_record& r : runs)
      if (g < r.rows.size()) {
        var_best += (r.rows[g].best_fitness - agg.mean_best[g]) *
                    (r.rows[g].best_fitness - agg.mean_best[g]);
        var_avg += (r.rows[g].avg_fitness - agg.mean_avg[g]) *
                   (r.rows[g].avg_fitness - agg.mean_avg[g]);
      }
    agg.std_best[g] = std::sqrt(var_best / n);
    agg.std_avg[g] = std::sqrt(var_avg / n);
  }

  double final_best = 0.0, final_gen = 0.0;
  for (const run_record& r : runs) {
    final_best += r.best_fitness;
    final_gen += r.rows.back().generation;
  }
  agg.mean_final_best = final_best / static_cast<double>(runs.size());
  agg.mean_termination_generation =
      final_gen / static_cast<double>(runs.size());
  return agg;
}

inline std::string run_file_stem(int run_id, ga_mode mode) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%04d_%s", run_id, algo_name(mode));
  return buf;
}

}  // namespace detail

constexpr const char* aggregate_csv_header =
    "algo,generation,runs,mean_best,std_best,mean_avg,std_avg";

inline void write_aggregate_csv(std::ostream& out,
                                const std::optional<algo_aggregate>& grga_agg,
                                const std::optional<algo_aggregate>& base_agg) {
  out << aggregate_csv_header << '\n';
  auto emit = [&](const char* name, const algo_aggregate& agg) {
    for (std::size_t g = 0; g < agg.counts.size(); ++g)
      out << name << ',' << g << ',' << agg.counts[g] << ','
          << format_double(agg.mean_best[g]) << ','
          << format_double(agg.std_best[g]) << ','
          << format_double(agg.mean_avg[g]) << ','
          << format_double(agg.std_avg[g]) << '\n';
  };
  if (grga_agg) emit("grga", *grga_agg);
  if (base_agg) emit("baseline", *base_agg);
}

// --- the Monte Carlo harness -------------------------------------------------

namespace detail {

struct problem_bundle {
  gene_space space;
  fitness_function fitness;
  std::optional<dataset> featsel_data;  // kept for feature-name reporting
};

inline problem_bundle build_problem(const experiment_config& config) {
  switch (config.problem) {
    case problem_kind::shubert:
      return {shubert_space(config.box), shubert_fitness(config.box), {}};
    case problem_kind::featsel: {
      dataset data = load_dataset(config.dataset_path, config.label_column);
      featsel_fitness_config fc{data, config.penalty, config.folds};
      return {featsel_space(data), make_featsel_fitness(std::move(fc)),
              std::move(data)};
    }
    default:
      return {*config.custom_space, config.custom_fitness, {}};
  }
}

// Probe that the output directory exists and accepts writes before any run
// burns cycles.
inline void prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory " + dir + ": " +
                         ec.message());
  const std::filesystem::path probe =
      std::filesystem::path(dir) / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw io_error("output directory not writable: " + dir);
  }
  std::filesystem::remove(probe, ec);
}

struct pair_result {
  std::optional<run_record> grga;
  std::optional<run_record> baseline;
};

}  // namespace detail

// Run mc_runs paired comparisons: run i of each algorithm is seeded with
// base_seed + i, so any performance difference is attributable to locus
// selection alone.  Runs execute on a small worker pool (`jobs` wide); all
// files are written by this thread once the pool drains, so outputs are
// deterministic for a given config regardless of parallelism.
inline comparison_summary run_experiment(const experiment_config& config) {
  config.validate();
  detail::prepare_output_dir(config.output_dir);
  const detail::problem_bundle problem = detail::build_problem(config);

  const bool want_grga = config.mode != experiment_mode::baseline_only;
  const bool want_base = config.mode != experiment_mode::grga_only;

  std::vector<detail::pair_result> results(
      static_cast<std::size_t>(config.mc_runs));
  std::atomic<int> next_run{0};
  std::exception_ptr first_failure;
  std::mutex failure_lock;

  auto worker = [&]() {
    while (true) {
      const int i = next_run.fetch_add(1);
      if (i >= config.mc_runs) return;
      try {
        ga_config run_cfg = config.ga;
        run_cfg.seed = config.base_seed + static_cast<std::uint64_t>(i);
        if (want_grga) {
          run_cfg.mode = ga_mode::grga;
          results[static_cast<std::size_t>(i)].grga =
              evolve(run_cfg, problem.space, problem.fitness, config.update,
                     config.strength);
        }
        if (want_base) {
          run_cfg.mode = ga_mode::baseline;
          results[static_cast<std::size_t>(i)].baseline =
              evolve(run_cfg, problem.space, problem.fitness, config.update,
                     config.strength);
        }
      } catch (...) {
        std::lock_guard guard(failure_lock);
        if (!first_failure) first_failure = std::current_exception();
        next_run.store(config.mc_runs);
        return;
      }
    }
  };

  const int pool = std::min(config.jobs, config.mc_runs);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(pool));
  for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (first_failure) std::rethrow_exception(first_failure);

  // Single-writer output phase.
  const std::filesystem::path out_dir(config.output_dir);
  auto write_run = [&](int run_id, ga_mode mode, const run_record& record) {
    const std::string stem = detail::run_file_stem(run_id, mode);
    {
      std::ofstream out(out_dir / (stem + ".csv"));
      if (!out) throw io_error("cannot write run CSV for " + stem);
      write_run_csv(out, run_id, mode, record);
    }
    nlohmann::json side{
        {"run_id", run_id},
        {"algo", algo_name(mode)},
        {"seed", config.base_seed + static_cast<std::uint64_t>(run_id)},
        {"termination_reason", reason_name(record.reason)},
        {"best_fitness", record.best_fitness},
        {"best_chromosome", record.best_chromosome},
        {"config",
         {{"ga", ga_config_to_json([&] {
             ga_config c = config.ga;
             c.seed = config.base_seed + static_cast<std::uint64_t>(run_id);
             c.mode = mode;
             return c;
           }())},
          {"update", update_params_to_json(config.update)},
          {"strength", strength_params_to_json(config.strength)}}},
    };
    if (problem.featsel_data)
      side["selected_features"] =
          selected_feature_names(*problem.featsel_data, record.best_chromosome);
    save_json(side, (out_dir / (stem + ".json")).string());
    if (record.final_rggr)
      save_json(rggr_to_json(*record.final_rggr),
                (out_dir / (stem + ".rggr.json")).string());
  };

  std::vector<run_record> grga_runs, base_runs;
  for (int i = 0; i < config.mc_runs; ++i) {
    if (results[static_cast<std::size_t>(i)].grga) {
      write_run(i, ga_mode::grga, *results[static_cast<std::size_t>(i)].grga);
      grga_runs.push_back(std::move(*results[static_cast<std::size_t>(i)].grga));
    }
    if (results[static_cast<std::size_t>(i)].baseline) {
      write_run(i, ga_mode::baseline,
                *results[static_cast<std::size_t>(i)].baseline);
      base_runs.push_back(
          std::move(*results[static_cast<std::size_t>(i)].baseline));
    }
  }

  comparison_summary summary;
  if (!grga_runs.empty()) summary.grga = detail::aggregate_runs(grga_runs);
  if (!base_runs.empty()) summary.baseline = detail::aggregate_runs(base_runs);

  if (summary.grga && summary.baseline) {
    double wins = 0.0;
    for (std::size_t i = 0; i < grga_runs.size(); ++i) {
      if (grga_runs[i].best_fitness > base_runs[i].best_fitness)
        wins += 1.0;
      else if (grga_runs[i].best_fitness == base_runs[i].best_fitness)
        wins += 0.5;
    }
    summary.win_rate = wins / static_cast<double>(grga_runs.size());

    const std::size_t shared = std::min(summary.grga->mean_avg.size(),
                                        summary.baseline->mean_avg.size());
    for (std::size_t g = 0; g < shared; ++g)
      if (summary.grga->mean_avg[g] > summary.baseline->mean_avg[g]) {
        summary.crossover_generation = static_cast<int>(g);
        break;
      }
  }

  {
    std::ofstream out(out_dir / "aggregate.csv");
    if (!out) throw io_error("cannot write aggregate.csv");
    write_aggregate_csv(out, summary.grga, summary.baseline);
  }

  nlohmann::json summary_json{
      {"problem", config.problem == problem_kind::shubert   ? "shubert"
                  : config.problem == problem_kind::featsel ? "featsel"
                                                            : "custom"},
      {"mode", experiment_mode_name(config.mode)},
      {"mc_runs", config.mc_runs},
      {"base_seed", config.base_seed},
  };
  auto algo_json = [](const algo_aggregate& agg) {
    return nlohmann::json{
        {"mean_final_best", agg.mean_final_best},
        {"mean_termination_generation", agg.mean_termination_generation},
        {"generations_recorded", agg.counts.size()},
    };
  };
  if (summary.grga) summary_json["grga"] = algo_json(*summary.grga);
  if (summary.baseline) summary_json["baseline"] = algo_json(*summary.baseline);
  if (summary.grga && summary.baseline) {
    summary_json["win_rate"] = summary.win_rate;
    if (summary.crossover_generation >= 0)
      summary_json["crossover_generation"] = summary.crossover_generation;
    else
      summary_json["crossover_generation"] = nullptr;
  }
  if (problem.featsel_data && !grga_runs.empty()) {
    const run_record* best = &grga_runs.front();
    for (const run_record& r : grga_runs)
      if (r.best_fitness > best->best_fitness) best = &r;
    summary_json["best_selected_features"] =
        selected_feature_names(*problem.featsel_data, best->best_chromosome);
  }
  save_json(summary_json, (out_dir / "summary.json").string());
  return summary;
}

// --- report emission ---------------------------------------------------------

// Top-k weights per column as plot-ready CSV.  With a decode box, node
// indices are also decoded to their real-valued bin edges.
inline void emit_heatmap(const rggr& graph, int k,
                         const std::optional<discretized_box>& decode,
                         std::ostream& out) {
  if (k < 0) throw config_error("emit_heatmap: k must be >= 0");
  if (decode && decode->dims != graph.space().num_loci())
    throw config_error("emit_heatmap: decode box dimensions do not match");
  out << "column,rank,from_node,to_node,weight";
  if (decode) out << ",from_value,to_value";
  out << '\n';
  if (k == 0) return;
  const auto ranked = graph.top_k_weights(k);
  for (std::size_t column = 0; column < ranked.size(); ++column) {
    for (std::size_t rank = 0; rank < ranked[column].size(); ++rank) {
      const ranked_edge& e = ranked[column][rank];
      out << column << ',' << rank + 1 << ',' << e.from << ',' << e.to << ','
          << format_double(e.weight);
      if (decode)
        out << ','
            << format_double(
                   decode_bin(e.from, *decode, static_cast<int>(column)))
            << ','
            << format_double(
                   decode_bin(e.to, *decode, static_cast<int>(column) + 1));
      out << '\n';
    }
  }
}

constexpr const char* slice_csv_header =
    "pair_rank,x1_bin,x2_bin,x3_bin,x1,x2,x3,value";

// For each of the heaviest (x1, x2) pairs, sweep x3 across all bins and emit
// the shubert value at every decoded point.
inline void emit_fixed_slice(const rggr& graph, const discretized_box& box,
                             int top_pairs, std::ostream& out) {
  box.validate();
  if (graph.space().num_loci() != 3 || box.dims != 3)
    throw config_error("emit_fixed_slice: expects a 3-dimensional snapshot");
  for (int k = 0; k < 3; ++k)
    if (graph.space().alphabet_size(k) != box.bins)
      throw config_error("emit_fixed_slice: snapshot bins do not match box");
  if (top_pairs < 1)
    throw config_error("emit_fixed_slice: top_pairs must be >= 1");

  out << slice_csv_header << '\n';
  const auto ranked = graph.top_k_weights(top_pairs);
  const auto& pairs = ranked.front();
  for (std::size_t rank = 0; rank < pairs.size(); ++rank) {
    const double x1 = decode_bin(pairs[rank].from, box, 0);
    const double x2 = decode_bin(pairs[rank].to, box, 1);
    for (int b3 = 0; b3 < box.bins; ++b3) {
      const double x3 = decode_bin(b3, box, 2);
      const double value = shubert(std::vector<double>{x1, x2, x3});
      out << rank + 1 << ',' << pairs[rank].from << ',' << pairs[rank].to
          << ',' << b3 << ',' << format_double(x1) << ',' << format_double(x2)
          << ',' << format_double(x3) << ',' << format_double(value) << '\n';
    }
  }
}

// --- aggregate verification --------------------------------------------------

// Re-derive aggregate.csv from the per-run CSVs in `dir` and require an
// exact match.  Returns the number of run files checked.
inline int verify_aggregate(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw io_error("not a directory: " + dir);

  std::vector<std::string> run_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) == 0 && name.size() > 4 &&
        name.ends_with(".csv"))
      run_files.push_back(entry.path().string());
  }
  if (run_files.empty()) throw io_error("no run CSVs found in " + dir);
  std::sort(run_files.begin(), run_files.end());

  std::vector<run_record> grga_runs, base_runs;
  for (const std::string& path : run_files) {
    const csv_table table = read_csv_strict(path, run_csv_header);
    if (table.rows.empty()) throw io_error("run CSV has no rows: " + path);
    run_record record;
    const std::string algo = table.rows.front()[1];
    for (const auto& row : table.rows) {
      if (row[1] != algo)
        throw io_error("mixed algo column in " + path);
      generation_row gen;
      gen.generation = static_cast<int>(
          parse_double_strict(row[2], path + " generation"));
      gen.best_fitness = parse_double_strict(row[3], path + " best_fitness");
      gen.avg_fitness = parse_double_strict(row[4], path + " avg_fitness");
      record.rows.push_back(gen);
    }
    record.best_fitness = record.rows.back().best_fitness;
    for (const generation_row& r : record.rows)
      record.best_fitness = std::max(record.best_fitness, r.best_fitness);
    if (algo == "grga")
      grga_runs.push_back(std::move(record));
    else if (algo == "baseline")
      base_runs.push_back(std::move(record));
    else
      throw io_error("unknown algo '" + algo + "' in " + path);
  }

  std::optional<algo_aggregate> grga_agg, base_agg;
  if (!grga_runs.empty()) grga_agg = detail::aggregate_runs(grga_runs);
  if (!base_runs.empty()) base_agg = detail::aggregate_runs(base_runs);

  std::ostringstream recomputed;
  write_aggregate_csv(recomputed, grga_agg, base_agg);

  std::ifstream in(fs::path(dir) / "aggregate.csv");
  if (!in) throw io_error("cannot open aggregate.csv in " + dir);
  std::ostringstream stored;
  stored << in.rdbuf();

  if (stored.str() != recomputed.str())
    throw run_error("aggregate.csv does not match recomputation from run CSVs");
  return static_cast<int>(run_files.size());
}

}  // namespace grga
