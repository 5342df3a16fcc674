#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "grga/engine.hpp"
#include "grga/errors.hpp"
#include "grga/gene_space.hpp"

namespace grga {

// Axis-aligned box, identical bounds in every dimension, split into `bins`
// left-closed intervals per dimension.
struct discretized_box {
  int dims = 3;
  double lo = -10.0;
  double hi = 10.0;
  int bins = 60;

  void validate() const {
    if (dims < 1) throw config_error("discretized_box: dims must be >= 1");
    if (!(hi > lo)) throw config_error("discretized_box: hi must exceed lo");
    if (bins < 1) throw config_error("discretized_box: bins must be >= 1");
  }

  // Total number of grid cells, saturating instead of overflowing.
  double cell_count() const {
    return std::pow(static_cast<double>(bins), dims);
  }
};

// Shubert test function, maximization form:
//   F(x) = -prod_i sum_{j=1..5} j*cos((j+1)*x_i + j).
// Over [-10,10]^3 it has 81 global peaks of height 2709.0935.
inline double shubert(std::span<const double> x) {
  double product = 1.0;
  for (double xi : x) {
    double inner = 0.0;
    for (int j = 1; j <= 5; ++j)
      inner += j * std::cos((j + 1) * xi + j);
    product *= inner;
  }
  return -product;
}

// Left edge of bin `bin_index`: (hi - lo) * bin_index / bins + lo.
inline double decode_bin(int bin_index, const discretized_box& box, int dim) {
  box.validate();
  if (dim < 0 || dim >= box.dims)
    throw config_error("decode_bin: dimension out of range");
  if (bin_index < 0 || bin_index >= box.bins)
    throw config_error("decode_bin: bin " + std::to_string(bin_index) +
                       " outside [0, " + std::to_string(box.bins) + ")");
  return (box.hi - box.lo) * static_cast<double>(bin_index) /
             static_cast<double>(box.bins) +
         box.lo;
}

inline std::vector<double> decode_chromosome(const chromosome& genes,
                                             const discretized_box& box) {
  if (static_cast<int>(genes.size()) != box.dims)
    throw config_error("decode_chromosome: chromosome length " +
                       std::to_string(genes.size()) + " does not match " +
                       std::to_string(box.dims) + " dimensions");
  std::vector<double> x(genes.size());
  for (int d = 0; d < box.dims; ++d)
    x[static_cast<std::size_t>(d)] =
        decode_bin(genes[static_cast<std::size_t>(d)], box, d);
  return x;
}

// Exhaustive evaluation of shubert over every grid cell.  Ground truth for
// the discretized optimum and for value quantiles.
struct grid_result {
  std::vector<int> best_bins;
  double best_value = 0.0;
  std::vector<double> sorted_values;  // ascending

  // Empirical quantile by lower nearest rank; quantile(1.0) is the maximum.
  double quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0))
      throw config_error("quantile: q must be in [0, 1]");
    const auto idx = static_cast<std::size_t>(
        q * static_cast<double>(sorted_values.size() - 1));
    return sorted_values[idx];
  }
};

inline grid_result grid_oracle(const discretized_box& box) {
  box.validate();
  if (box.cell_count() > 1e7)
    throw config_error("grid_oracle: grid exceeds the 1e7 cell budget");

  // One dimension's inner sums serve all dimensions (identical bounds).
  std::vector<double> inner(static_cast<std::size_t>(box.bins));
  for (int b = 0; b < box.bins; ++b) {
    const double x = decode_bin(b, box, 0);
    double s = 0.0;
    for (int j = 1; j <= 5; ++j) s += j * std::cos((j + 1) * x + j);
    inner[static_cast<std::size_t>(b)] = s;
  }

  grid_result result;
  const auto total = static_cast<std::size_t>(box.cell_count());
  result.sorted_values.reserve(total);
  std::vector<int> bins(static_cast<std::size_t>(box.dims), 0);
  bool first = true;
  while (true) {
    double product = 1.0;
    for (int d = 0; d < box.dims; ++d)
      product *= inner[static_cast<std::size_t>(bins[static_cast<std::size_t>(d)])];
    const double value = -product;
    result.sorted_values.push_back(value);
    if (first || value > result.best_value) {
      result.best_value = value;
      result.best_bins = bins;
      first = false;
    }
    int d = box.dims - 1;
    while (d >= 0 && ++bins[static_cast<std::size_t>(d)] == box.bins) {
      bins[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  std::sort(result.sorted_values.begin(), result.sorted_values.end());
  return result;
}

// Polish a grid point into the continuous local maximum: cyclic coordinate
// ascent with golden-section line searches over +-1 bin width.
inline std::pair<std::vector<double>, double> refine_local_max(
    const discretized_box& box, const std::vector<int>& start_bins,
    int sweeps = 64) {
  std::vector<double> x = decode_chromosome(start_bins, box);
  const double h = (box.hi - box.lo) / static_cast<double>(box.bins);
  constexpr double inv_phi = 0.6180339887498949;

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int d = 0; d < box.dims; ++d) {
      auto value_at = [&](double xd) {
        const double saved = x[static_cast<std::size_t>(d)];
        x[static_cast<std::size_t>(d)] = xd;
        const double v = shubert(x);
        x[static_cast<std::size_t>(d)] = saved;
        return v;
      };
      double a = x[static_cast<std::size_t>(d)] - h;
      double b = x[static_cast<std::size_t>(d)] + h;
      double c1 = b - inv_phi * (b - a);
      double c2 = a + inv_phi * (b - a);
      for (int it = 0; it < 100; ++it) {
        if (value_at(c1) > value_at(c2)) {
          b = c2;
          c2 = c1;
          c1 = b - inv_phi * (b - a);
        } else {
          a = c1;
          c1 = c2;
          c2 = a + inv_phi * (b - a);
        }
      }
      x[static_cast<std::size_t>(d)] = 0.5 * (a + b);
    }
  }
  return {x, shubert(x)};
}

inline gene_space shubert_space(const discretized_box& box) {
  box.validate();
  return gene_space::uniform(box.dims, box.bins);
}

// Fitness over bin chromosomes: decode each gene to its bin's left edge and
// evaluate shubert there.
inline fitness_function shubert_fitness(const discretized_box& box) {
  box.validate();
  return [box](const chromosome& genes) {
    const std::vector<double> x = decode_chromosome(genes, box);
    return shubert(x);
  };
}

// Extra smoke-test functions for engine sanity checks.  Both are classic
// minimization surfaces, exposed here in negated (maximization) form.

inline double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return s;
}

inline double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double xi : x)
    s += xi * xi - 10.0 * std::cos(2.0 * 3.14159265358979323846 * xi);
  return s;
}

inline fitness_function negated_fitness(const discretized_box& box,
                                        double (*fn)(std::span<const double>)) {
  box.validate();
  return [box, fn](const chromosome& genes) {
    const std::vector<double> x = decode_chromosome(genes, box);
    return -fn(x);
  };
}

}  // namespace grga
