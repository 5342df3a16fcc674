#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "grga/benchmarks.hpp"
#include "grga/engine.hpp"
#include "grga/errors.hpp"
#include "grga/rggr.hpp"

namespace grga {

// Shortest decimal text that parses back to the same double.  Used for every
// CSV number so identical runs emit byte-identical files.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

inline double parse_double_strict(const std::string& token,
                                  const std::string& context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(),
                                   value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw io_error("malformed numeric field '" + token + "' in " + context);
  if (!std::isfinite(value))
    throw io_error("non-finite value '" + token + "' in " + context);
  return value;
}

// --- RGGR snapshots --------------------------------------------------------
//
// Schema: {"alphabet_sizes": [...], "weights": [[[...]]]} with
// weights[k][i][j].  nlohmann emits shortest round-trip decimals, so the
// round trip is lossless to full double precision.

inline nlohmann::json rggr_to_json(const rggr& graph) {
  nlohmann::json weights = nlohmann::json::array();
  for (int k = 0; k < graph.num_columns(); ++k) {
    nlohmann::json matrix = nlohmann::json::array();
    for (int i = 0; i < graph.rows(k); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < graph.cols(k); ++j) row.push_back(graph.weight(k, i, j));
      matrix.push_back(std::move(row));
    }
    weights.push_back(std::move(matrix));
  }
  return nlohmann::json{{"alphabet_sizes", graph.space().alphabet_sizes()},
                        {"weights", std::move(weights)}};
}

inline rggr rggr_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("alphabet_sizes") || !j.contains("weights"))
    throw io_error("rggr snapshot: expected alphabet_sizes and weights");
  rggr graph{gene_space(j.at("alphabet_sizes").get<std::vector<int>>())};
  const auto& weights = j.at("weights");
  if (static_cast<int>(weights.size()) != graph.num_columns())
    throw io_error("rggr snapshot: weight column count mismatch");
  for (int k = 0; k < graph.num_columns(); ++k) {
    const auto& matrix = weights.at(static_cast<std::size_t>(k));
    if (static_cast<int>(matrix.size()) != graph.rows(k))
      throw io_error("rggr snapshot: row count mismatch in column " +
                     std::to_string(k));
    for (int i = 0; i < graph.rows(k); ++i) {
      const auto& row = matrix.at(static_cast<std::size_t>(i));
      if (static_cast<int>(row.size()) != graph.cols(k))
        throw io_error("rggr snapshot: column count mismatch in column " +
                       std::to_string(k));
      for (int j2 = 0; j2 < graph.cols(k); ++j2)
        graph.set_weight(k, i, j2,
                         row.at(static_cast<std::size_t>(j2)).get<double>());
    }
  }
  return graph;
}

// Grid-oracle summary: the discretized optimum plus reference quantiles.
inline nlohmann::json grid_result_to_json(const grid_result& grid) {
  return nlohmann::json{{"best_bins", grid.best_bins},
                        {"best_value", grid.best_value},
                        {"quantiles",
                         {{"0.9", grid.quantile(0.9)},
                          {"0.99", grid.quantile(0.99)},
                          {"0.999", grid.quantile(0.999)}}}};
}

inline void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw io_error("cannot parse JSON in " + path + ": " + e.what());
  }
}

// --- run traces ------------------------------------------------------------

inline const char* algo_name(ga_mode mode) {
  return mode == ga_mode::grga ? "grga" : "baseline";
}

inline const char* reason_name(termination_reason reason) {
  return reason == termination_reason::stall ? "stall" : "max_generations";
}

constexpr const char* run_csv_header = "run_id,algo,generation,best_fitness,avg_fitness";

inline void write_run_csv(std::ostream& out, int run_id, ga_mode mode,
                          const run_record& record) {
  out << run_csv_header << '\n';
  for (const generation_row& row : record.rows)
    out << run_id << ',' << algo_name(mode) << ',' << row.generation << ','
        << format_double(row.best_fitness) << ','
        << format_double(row.avg_fitness) << '\n';
}

// Strict CSV table: exact header, rectangular rows, finite numerics.
struct csv_table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline csv_table read_csv_strict(const std::string& path,
                                 const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty CSV: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw io_error("unexpected header in " + path + ": '" + line + "'");

  csv_table table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != table.header.size())
      throw io_error(path + ":" + std::to_string(line_no) +
                     ": expected " + std::to_string(table.header.size()) +
                     " cells, got " + std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace grga
