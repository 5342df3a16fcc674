#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "grga/experiment.hpp"

using namespace grga;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct temp_dir {
  fs::path path;
  explicit temp_dir(const std::string& tag) {
    path = fs::temp_directory_path() / ("grga_exp_" + tag);
    fs::remove_all(path);
  }
  ~temp_dir() { fs::remove_all(path); }
};

experiment_config small_shubert_config(const std::string& out_dir) {
  experiment_config cfg;
  cfg.problem = problem_kind::shubert;
  cfg.box = {3, -10.0, 10.0, 12};
  cfg.ga.population_size = 12;
  cfg.ga.max_generations = 6;
  cfg.ga.stall_generations = 6;
  cfg.mc_runs = 1;
  cfg.base_seed = 42;
  cfg.output_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("a single paired run writes the documented file set", "[experiment]") {
  const temp_dir dir("filecount");
  const auto summary = run_experiment(small_shubert_config(dir.path.string()));

  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir.path))
    names.insert(entry.path().filename().string());

  REQUIRE(names.count("run_0000_grga.csv") == 1);
  REQUIRE(names.count("run_0000_baseline.csv") == 1);
  REQUIRE(names.count("aggregate.csv") == 1);
  REQUIRE(names.count("summary.json") == 1);
  REQUIRE(names.count("run_0000_grga.rggr.json") == 1);
  REQUIRE(names.count("run_0000_baseline.rggr.json") == 0);

  int run_csvs = 0;
  for (const auto& n : names)
    if (n.rfind("run_", 0) == 0 && n.ends_with(".csv")) ++run_csvs;
  REQUIRE(run_csvs == 2);

  REQUIRE(summary.grga.has_value());
  REQUIRE(summary.baseline.has_value());
}

TEST_CASE("paired runs share seeds", "[experiment]") {
  const temp_dir dir("pairing");
  auto cfg = small_shubert_config(dir.path.string());
  cfg.mc_runs = 3;
  run_experiment(cfg);

  for (int i = 0; i < 3; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "run_%04d", i);
    const auto grga_side =
        load_json((dir.path / (std::string(stem) + "_grga.json")).string());
    const auto base_side =
        load_json((dir.path / (std::string(stem) + "_baseline.json")).string());
    REQUIRE(grga_side.at("seed").get<std::uint64_t>() ==
            base_side.at("seed").get<std::uint64_t>());
    REQUIRE(grga_side.at("seed").get<std::uint64_t>() ==
            42 + static_cast<std::uint64_t>(i));
  }
}

TEST_CASE("identical configs reproduce byte-identical outputs", "[experiment]") {
  const temp_dir dir_a("determinism_a");
  const temp_dir dir_b("determinism_b");
  auto cfg = small_shubert_config(dir_a.path.string());
  cfg.mc_runs = 2;
  run_experiment(cfg);
  cfg.output_dir = dir_b.path.string();
  cfg.jobs = 4;  // parallelism must not affect the bytes
  run_experiment(cfg);

  for (const char* name :
       {"aggregate.csv", "run_0000_grga.csv", "run_0001_baseline.csv",
        "run_0001_grga.rggr.json"})
    REQUIRE(slurp(dir_a.path / name) == slurp(dir_b.path / name));
}

TEST_CASE("run CSVs parse strictly and verify against the aggregate",
          "[experiment]") {
  const temp_dir dir("verify");
  auto cfg = small_shubert_config(dir.path.string());
  cfg.mc_runs = 2;
  run_experiment(cfg);

  REQUIRE(verify_aggregate(dir.path.string()) == 4);

  SECTION("tampered aggregates are caught") {
    std::ofstream out(dir.path / "aggregate.csv", std::ios::app);
    out << "grga,99,1,0,0,0,0\n";
    out.close();
    REQUIRE_THROWS_AS(verify_aggregate(dir.path.string()), run_error);
  }

  SECTION("the strict reader rejects foreign headers") {
    REQUIRE_THROWS_AS(
        read_csv_strict((dir.path / "aggregate.csv").string(),
                        run_csv_header),
        io_error);
  }

  SECTION("every emitted value is finite and parseable") {
    const csv_table table = read_csv_strict(
        (dir.path / "run_0000_grga.csv").string(), run_csv_header);
    REQUIRE_FALSE(table.rows.empty());
    for (const auto& row : table.rows) {
      parse_double_strict(row[3], "best");
      parse_double_strict(row[4], "avg");
    }
  }
}

TEST_CASE("non-finite tokens are rejected by the strict parser", "[experiment]") {
  REQUIRE_THROWS_AS(parse_double_strict("nan", "t"), io_error);
  REQUIRE_THROWS_AS(parse_double_strict("inf", "t"), io_error);
  REQUIRE_THROWS_AS(parse_double_strict("1.2.3", "t"), io_error);
  REQUIRE(parse_double_strict("-7.5e2", "t") == -750.0);
}

TEST_CASE("shortest round-trip formatting survives reparsing", "[experiment]") {
  rng_engine rng(8);
  for (int i = 0; i < 5000; ++i) {
    const double x = (rng.next_unit() - 0.5) * std::pow(10.0, rng.next_index(8));
    REQUIRE(parse_double_strict(format_double(x), "roundtrip") == x);
  }
}

TEST_CASE("config files parse with defaults and overrides", "[experiment]") {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "problem": {"type": "shubert", "bins": 30},
    "ga": {"population_size": 50, "selection": {"type": "tournament", "size": 3}},
    "update": {"mu": 0.7, "v": {"type": "saturating", "c": 2.0, "alpha": 0.2}},
    "strength": {"c2": 0.25},
    "mc_runs": 7,
    "mode": "grga"
  })");
  const experiment_config cfg = experiment_config_from_json(j);
  REQUIRE(cfg.problem == problem_kind::shubert);
  REQUIRE(cfg.box.bins == 30);
  REQUIRE(cfg.box.dims == 3);  // untouched default
  REQUIRE(cfg.ga.population_size == 50);
  REQUIRE(cfg.ga.tournament_size == 3);
  REQUIRE(cfg.update.mu == 0.7);
  REQUIRE(cfg.update.v.type == v_function::kind::saturating);
  REQUIRE(cfg.update.v.alpha == 0.2);
  REQUIRE(cfg.strength.c2 == 0.25);
  REQUIRE(cfg.mc_runs == 7);
  REQUIRE(cfg.mode == experiment_mode::grga_only);

  SECTION("unknown enumerations are rejected") {
    REQUIRE_THROWS_AS(
        experiment_config_from_json(nlohmann::json{{"mode", "quantum"}}),
        config_error);
    REQUIRE_THROWS_AS(experiment_config_from_json(nlohmann::json{
                          {"problem", {{"type", "tsp"}}}}),
                      config_error);
  }

  SECTION("unknown keys are ignored") {
    const auto cfg2 = experiment_config_from_json(
        nlohmann::json{{"scaling_factor", 0.3}, {"mc_runs", 2}});
    REQUIRE(cfg2.mc_runs == 2);
  }
}

TEST_CASE("invalid experiment configs fail before any run", "[experiment]") {
  experiment_config cfg;
  cfg.mc_runs = 0;
  REQUIRE_THROWS_AS(cfg.validate(), config_error);

  cfg = experiment_config{};
  cfg.problem = problem_kind::featsel;
  cfg.dataset_path.clear();
  REQUIRE_THROWS_AS(cfg.validate(), config_error);

  cfg = experiment_config{};
  cfg.output_dir = "/proc/grga_cannot_write_here";
  REQUIRE_THROWS_AS(run_experiment(cfg), io_error);
}

TEST_CASE("heatmap CSV lists top edges per column", "[experiment]") {
  SECTION("fresh graph: unit weights, ties broken lexicographically") {
    rggr graph{gene_space::uniform(3, 4)};
    std::ostringstream out;
    emit_heatmap(graph, 2, std::nullopt, out);
    const std::string expected =
        "column,rank,from_node,to_node,weight\n"
        "0,1,0,0,1\n"
        "0,2,0,1,1\n"
        "1,1,0,0,1\n"
        "1,2,0,1,1\n";
    REQUIRE(out.str() == expected);
  }

  SECTION("k = 0 emits the header only") {
    rggr graph{gene_space::uniform(3, 4)};
    std::ostringstream out;
    emit_heatmap(graph, 0, std::nullopt, out);
    REQUIRE(out.str() == "column,rank,from_node,to_node,weight\n");
  }

  SECTION("decode box appends real-valued columns") {
    rggr graph{gene_space::uniform(3, 60)};
    graph.set_weight(0, 0, 7, 9.0);
    std::ostringstream out;
    emit_heatmap(graph, 1, discretized_box{3, -10.0, 10.0, 60}, out);
    std::istringstream lines(out.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    REQUIRE(header ==
            "column,rank,from_node,to_node,weight,from_value,to_value");
    REQUIRE(first == "0,1,0,7,9,-10,-7.666666666666666");
  }
}

TEST_CASE("fixed slice sweeps x3 for the heaviest pairs", "[experiment]") {
  const discretized_box box{3, -10.0, 10.0, 60};
  rggr graph{gene_space::uniform(3, 60)};
  graph.set_weight(0, 7, 9, 100.0);

  std::ostringstream out;
  emit_fixed_slice(graph, box, 1, out);
  const csv_table table = [&] {
    const auto tmp = fs::temp_directory_path() / "grga_slice.csv";
    std::ofstream f(tmp);
    f << out.str();
    f.close();
    return read_csv_strict(tmp.string(), slice_csv_header);
  }();

  REQUIRE(table.rows.size() == 60);
  for (const auto& row : table.rows) {
    REQUIRE(row[1] == "7");
    REQUIRE(row[2] == "9");
    // Every emitted value equals a direct evaluation at the decoded point.
    const double x1 = parse_double_strict(row[4], "x1");
    const double x2 = parse_double_strict(row[5], "x2");
    const double x3 = parse_double_strict(row[6], "x3");
    const double value = parse_double_strict(row[7], "value");
    REQUIRE(value == shubert(std::vector<double>{x1, x2, x3}));
  }

  SECTION("fresh graph starts from the lexicographically first pair") {
    rggr fresh{gene_space::uniform(3, 5)};
    std::ostringstream fresh_out;
    emit_fixed_slice(fresh, discretized_box{3, -10.0, 10.0, 5}, 1, fresh_out);
    std::istringstream lines(fresh_out.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    REQUIRE(first.rfind("1,0,0,0,", 0) == 0);
  }

  SECTION("non-3D snapshots are rejected") {
    rggr flat{gene_space::uniform(4, 5)};
    std::ostringstream sink;
    REQUIRE_THROWS_AS(
        emit_fixed_slice(flat, discretized_box{3, -10.0, 10.0, 5}, 1, sink),
        config_error);
  }
}

TEST_CASE("grid oracle summaries export best bins and quantiles",
          "[experiment]") {
  const discretized_box box{2, -10.0, 10.0, 8};
  const grid_result grid = grid_oracle(box);
  const nlohmann::json j = grid_result_to_json(grid);
  REQUIRE(j.at("best_bins").get<std::vector<int>>() == grid.best_bins);
  REQUIRE(j.at("best_value").get<double>() == grid.best_value);
  REQUIRE(j.at("quantiles").at("0.99").get<double>() == grid.quantile(0.99));
  REQUIRE(j.at("quantiles").at("0.9").get<double>() <=
          j.at("quantiles").at("0.999").get<double>());
}

TEST_CASE("featsel experiment reports selected feature names", "[experiment]") {
  const temp_dir dir("featsel_exp");
  experiment_config cfg;
  cfg.problem = problem_kind::featsel;
  cfg.dataset_path = std::string(GRGA_DATA_DIR) + "/featsel_fixture.csv";
  cfg.label_column = "class";
  cfg.penalty = 0.001;
  cfg.folds = 5;
  cfg.ga.population_size = 16;
  cfg.ga.max_generations = 8;
  cfg.ga.stall_generations = 8;
  cfg.ga.mutation_rate = 0.3;
  cfg.mc_runs = 1;
  cfg.base_seed = 7;
  cfg.output_dir = dir.path.string();

  run_experiment(cfg);
  const auto side = load_json((dir.path / "run_0000_grga.json").string());
  REQUIRE(side.contains("selected_features"));
  const auto summary = load_json((dir.path / "summary.json").string());
  REQUIRE(summary.contains("best_selected_features"));
  REQUIRE(summary.at("problem") == "featsel");
}
