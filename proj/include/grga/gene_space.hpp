#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "grga/errors.hpp"
#include "grga/random.hpp"

namespace grga {

// A candidate solution: one allele index per locus, genes[k] in [0, n_k).
using chromosome = std::vector<int>;

// The discrete search space: num_loci() columns, column k drawing from an
// alphabet of alphabet_size(k) values.  At least two loci are required so the
// relationship graph has at least one edge column.
class gene_space {
 public:
  explicit gene_space(std::vector<int> alphabet_sizes)
      : sizes_(std::move(alphabet_sizes)) {
    if (sizes_.size() < 2)
      throw config_error("gene_space: need at least 2 loci, got " +
                         std::to_string(sizes_.size()));
    for (std::size_t k = 0; k < sizes_.size(); ++k)
      if (sizes_[k] < 1)
        throw config_error("gene_space: alphabet size of locus " +
                           std::to_string(k) + " must be >= 1, got " +
                           std::to_string(sizes_[k]));
  }

  // All loci share one alphabet size.
  static gene_space uniform(int num_loci, int alphabet_size) {
    if (num_loci < 2)
      throw config_error("gene_space: need at least 2 loci, got " +
                         std::to_string(num_loci));
    return gene_space(std::vector<int>(static_cast<std::size_t>(num_loci),
                                       alphabet_size));
  }

  int num_loci() const { return static_cast<int>(sizes_.size()); }
  int num_edge_columns() const { return num_loci() - 1; }
  int alphabet_size(int k) const { return sizes_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& alphabet_sizes() const { return sizes_; }

  bool contains(const chromosome& c) const {
    if (c.size() != sizes_.size()) return false;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k] < 0 || c[k] >= sizes_[k]) return false;
    return true;
  }

  void require(const chromosome& c) const {
    if (!contains(c))
      throw config_error("chromosome does not fit gene space (length " +
                         std::to_string(c.size()) + ", expected " +
                         std::to_string(sizes_.size()) + " loci)");
  }

  chromosome random_chromosome(rng_engine& rng) const {
    chromosome c(sizes_.size());
    for (std::size_t k = 0; k < sizes_.size(); ++k)
      c[k] = static_cast<int>(rng.next_index(static_cast<std::size_t>(sizes_[k])));
    return c;
  }

  bool operator==(const gene_space& other) const = default;

 private:
  std::vector<int> sizes_;
};

}  // namespace grga
