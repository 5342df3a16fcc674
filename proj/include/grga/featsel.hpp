#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "grga/engine.hpp"
#include "grga/errors.hpp"
#include "grga/random.hpp"

namespace grga {

// Tabular classification data.  Features are standardized per column to zero
// mean and unit variance at load time (constant columns become all zeros).
struct dataset {
  std::vector<std::vector<double>> features;  // row-major, one row per sample
  std::vector<int> labels;                    // dense class ids from 0
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;  // id -> original label text

  std::size_t num_samples() const { return features.size(); }
  std::size_t num_features() const { return feature_names.size(); }
  std::size_t num_classes() const { return class_names.size(); }

  // Share of the most common class; the accuracy of the no-feature fallback.
  double majority_rate() const {
    std::vector<int> counts(num_classes(), 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
           static_cast<double>(labels.size());
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_numeric_cell(const std::string& cell, std::size_t row,
                                 const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  while (ptr != last && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  if (ec != std::errc{} || ptr != last || !std::isfinite(value))
    throw io_error("non-numeric feature cell '" + cell + "' in column '" +
                   column + "', data row " + std::to_string(row + 1));
  return value;
}

}  // namespace detail

// Load a headered CSV with numeric feature columns and one label column.
// Distinct ingestion failures (missing file, non-numeric cell, single-class
// labels) raise distinct errors.
inline dataset load_dataset(const std::string& path,
                            const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw io_error("dataset is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = detail::split_csv_line(line);

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_column) label_idx = i;
  if (label_idx == header.size())
    throw io_error("label column '" + label_column + "' not found in " + path);

  dataset data;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (i != label_idx) data.feature_names.push_back(header[i]);
  if (data.feature_names.empty())
    throw io_error("dataset has no feature columns: " + path);

  std::map<std::string, int> class_ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw io_error("row " + std::to_string(row + 1) + " has " +
                     std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(header.size()));
    std::vector<double> feats;
    feats.reserve(data.feature_names.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_idx) continue;
      feats.push_back(detail::parse_numeric_cell(cells[i], row, header[i]));
    }
    auto [it, inserted] = class_ids.try_emplace(
        cells[label_idx], static_cast<int>(class_ids.size()));
    data.labels.push_back(it->second);
    data.features.push_back(std::move(feats));
    ++row;
  }

  if (data.num_samples() < 2)
    throw io_error("dataset needs at least 2 samples, got " +
                   std::to_string(data.num_samples()));
  if (class_ids.size() < 2)
    throw io_error("dataset labels contain a single class: '" +
                   class_ids.begin()->first + "'");

  data.class_names.resize(class_ids.size());
  for (const auto& [name, id] : class_ids)
    data.class_names[static_cast<std::size_t>(id)] = name;

  // Standardize columns; constant columns go to zero rather than dividing
  // by a zero deviation.
  const std::size_t n = data.num_samples();
  for (std::size_t f = 0; f < data.num_features(); ++f) {
    double mean = 0.0;
    for (const auto& r : data.features) mean += r[f];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& r : data.features) var += (r[f] - mean) * (r[f] - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (auto& r : data.features)
      r[f] = sd > 0.0 ? (r[f] - mean) / sd : 0.0;
  }
  return data;
}

// Wrapper-fitness configuration: stratified k-fold accuracy of a
// 1-nearest-neighbor classifier over the selected features, minus a small
// per-feature penalty that breaks accuracy ties toward smaller subsets.
struct featsel_fitness_config {
  dataset data;
  double penalty = 0.001;
  int folds = 5;

  void validate() const {
    if (data.num_samples() < 2 || data.num_classes() < 2)
      throw config_error("featsel_fitness: dataset not loaded");
    if (!(penalty >= 0.0))
      throw config_error("featsel_fitness: penalty must be >= 0");
    if (penalty * static_cast<double>(data.num_features()) >= 1.0)
      throw config_error(
          "featsel_fitness: penalty * num_features must stay below 1 so "
          "accuracy dominates");
    if (folds < 2) throw config_error("featsel_fitness: folds must be >= 2");
  }
};

namespace detail {

// Stratified fold ids: per class, shuffle deterministically and deal
// round-robin.  The seed is fixed so one dataset always folds the same way.
inline std::vector<int> stratified_folds(const dataset& data, int folds) {
  rng_engine rng(0x5eedf01d5ULL);
  std::vector<int> fold_of(data.num_samples(), 0);
  for (std::size_t cls = 0; cls < data.num_classes(); ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.num_samples(); ++i)
      if (data.labels[i] == static_cast<int>(cls)) members.push_back(i);
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.next_index(i)]);
    for (std::size_t i = 0; i < members.size(); ++i)
      fold_of[members[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

struct featsel_state {
  dataset data;
  double penalty;
  int folds;
  std::vector<int> fold_of;
  double majority;
  // Masks are few when features fit a machine word, so memoize them.  The
  // lock keeps concurrent evaluations of one instance safe.
  mutable std::unordered_map<std::uint64_t, double> memo;
  mutable std::mutex memo_lock;
};

inline double knn_accuracy(const featsel_state& state,
                           const std::vector<std::size_t>& selected) {
  const auto& rows = state.data.features;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double best_dist = 0.0;
    std::size_t best_j = rows.size();
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (state.fold_of[j] == state.fold_of[i]) continue;
      double dist = 0.0;
      for (std::size_t f : selected) {
        const double d = rows[i][f] - rows[j][f];
        dist += d * d;
      }
      if (best_j == rows.size() || dist < best_dist) {
        best_dist = dist;
        best_j = j;
      }
    }
    if (best_j < rows.size() &&
        state.data.labels[best_j] == state.data.labels[i])
      ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace detail

// Build the wrapper fitness over binary chromosomes (one {0,1} locus per
// feature).  Deterministic: same mask, same dataset, same folds give the
// same value.  An all-zero mask falls back to the majority-class rate.
inline fitness_function make_featsel_fitness(featsel_fitness_config config) {
  config.validate();
  auto state = std::make_shared<detail::featsel_state>();
  state->fold_of = detail::stratified_folds(config.data, config.folds);
  state->majority = config.data.majority_rate();
  state->penalty = config.penalty;
  state->folds = config.folds;
  state->data = std::move(config.data);

  return [state](const chromosome& mask) {
    if (mask.size() != state->data.num_features())
      throw config_error("featsel fitness: chromosome length " +
                         std::to_string(mask.size()) + " does not match " +
                         std::to_string(state->data.num_features()) +
                         " features");
    std::vector<std::size_t> selected;
    std::uint64_t key = 0;
    for (std::size_t f = 0; f < mask.size(); ++f) {
      if (mask[f] != 0 && mask[f] != 1)
        throw config_error("featsel fitness: chromosome is not binary");
      if (mask[f] == 1) selected.push_back(f);
      if (f < 64 && mask[f] == 1) key |= std::uint64_t{1} << f;
    }
    const bool cacheable = mask.size() <= 64;
    if (cacheable) {
      std::lock_guard guard(state->memo_lock);
      auto it = state->memo.find(key);
      if (it != state->memo.end()) return it->second;
    }

    const double accuracy = selected.empty()
                                ? state->majority
                                : detail::knn_accuracy(*state, selected);
    const double value =
        accuracy -
        state->penalty * static_cast<double>(selected.size());
    if (cacheable) {
      std::lock_guard guard(state->memo_lock);
      state->memo.emplace(key, value);
    }
    return value;
  };
}

inline gene_space featsel_space(const dataset& data) {
  if (data.num_features() < 2)
    throw config_error("featsel_space: need at least 2 features");
  return gene_space::uniform(static_cast<int>(data.num_features()), 2);
}

// Names of the features a mask selects, in column order.
inline std::vector<std::string> selected_feature_names(const dataset& data,
                                                       const chromosome& mask) {
  std::vector<std::string> names;
  for (std::size_t f = 0; f < mask.size() && f < data.num_features(); ++f)
    if (mask[f] == 1) names.push_back(data.feature_names[f]);
  return names;
}

}  // namespace grga
