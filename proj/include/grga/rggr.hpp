#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "grga/errors.hpp"
#include "grga/gene_space.hpp"
#include "grga/random.hpp"

namespace grga {

// Control term V(W) in the weight updates.  Throttles how much a single
// update may move an already-nonzero weight.  Must be strictly positive for
// every W >= 0.
struct v_function {
  enum class kind { constant, saturating };

  kind type = kind::constant;
  double c = 1.0;      // constant value, or numerator of the saturating form
  double alpha = 0.1;  // saturation slope, c / (1 + alpha * W)

  double operator()(double w) const {
    return type == kind::constant ? c : c / (1.0 + alpha * w);
  }

  static v_function constant(double c) {
    return v_function{kind::constant, c, 0.0};
  }
  static v_function saturating(double c, double alpha) {
    return v_function{kind::saturating, c, alpha};
  }

  void validate() const {
    if (!(c > 0.0)) throw config_error("v_function: c must be > 0");
    if (type == kind::saturating && !(alpha >= 0.0))
      throw config_error("v_function: alpha must be >= 0");
  }
};

// Parameters of the fitness-driven weight updates.
struct update_params {
  // Acceptability threshold on delta = fitness - population average.
  // Individuals at or above it strengthen their edges, the rest weaken them.
  // Negative thresholds are rejected: they would let the zero-weight
  // strengthen branch drive a weight below zero.
  double lambda = 0.0;

  // rho governs how strongly delta saturates: the factor delta/(delta+rho)
  // stays inside [0, 1).  It is resolved per generation as
  // rho_fraction * |average fitness|, floored by rho_min so a zero or
  // negative average cannot degenerate the update.
  double rho_fraction = 0.1;
  double rho_min = 1e-6;

  // Bootstrap step for zero weights, in (0, 1).
  double mu = 0.8;

  v_function v{};

  // Scale applied to every update that lands on edge column 0.
  double first_column_damping = 0.5;

  double resolve_rho(double avg_fitness) const {
    return std::max(rho_min, rho_fraction * std::fabs(avg_fitness));
  }

  void validate() const {
    if (!(lambda >= 0.0))
      throw config_error("update_params: lambda must be >= 0");
    if (!(rho_fraction > 0.0))
      throw config_error("update_params: rho_fraction must be > 0");
    if (!(rho_min > 0.0))
      throw config_error("update_params: rho_min must be > 0");
    if (!(mu > 0.0 && mu < 1.0))
      throw config_error("update_params: mu must be in (0, 1)");
    if (!(first_column_damping > 0.0 && first_column_damping <= 1.0))
      throw config_error(
          "update_params: first_column_damping must be in (0, 1]");
    v.validate();
  }
};

// Coefficients of the edge strength s = 1 / (c1 + c2 * W).  c1 > 0 keeps the
// strength finite at W = 0; c2 sets how hard heavy edges are shielded from
// crossover and mutation.
struct strength_params {
  double c1 = 1.0;
  double c2 = 0.1;

  void validate() const {
    if (!(c1 > 0.0)) throw config_error("strength_params: c1 must be > 0");
    if (!(c2 >= 0.0)) throw config_error("strength_params: c2 must be >= 0");
  }
};

// Reinforce one edge of an above-threshold individual.  Nonzero weights grow
// by damping * (delta/(delta+rho)) * V(w); zero weights are bootstrapped by
// damping * mu * delta so dormant edges re-enter the candidate pool.
inline double strengthen_edge(double w, double delta, double rho,
                              const update_params& params, int column_k) {
  const double damping = column_k == 0 ? params.first_column_damping : 1.0;
  if (w != 0.0)
    return std::max(w + damping * (delta / (delta + rho)) * params.v(w), 0.0);
  return w + damping * params.mu * delta;
}

// Reverse of strengthen_edge for below-threshold individuals.  The caller
// passes the magnitude |delta - lambda| >= 0 so the saturating factor stays
// well defined; both branches floor at zero.
inline double weaken_edge(double w, double delta_magnitude, double rho,
                          const update_params& params, int column_k) {
  const double damping = column_k == 0 ? params.first_column_damping : 1.0;
  if (w != 0.0)
    return std::max(
        w - damping * (delta_magnitude / (delta_magnitude + rho)) * params.v(w),
        0.0);
  return std::max(w - damping * params.mu * delta_magnitude, 0.0);
}

// One (from, to, weight) entry of a ranked edge listing.
struct ranked_edge {
  int from = 0;
  int to = 0;
  double weight = 0.0;

  bool operator==(const ranked_edge&) const = default;
};

// Per-edge update counters, mirroring the weight matrix shapes.
using update_counts = std::vector<std::vector<int>>;

// The relationship graph over gene regulation: a directed multipartite graph
// with one node column per locus and one weight matrix per adjacent locus
// pair.  weight(k, i, j) scores allele i at locus k followed by allele j at
// locus k+1.  Every weight starts at 1 and never drops below 0.
//
// Instances are exclusively owned by one run; updates are strictly
// sequential because the math is order-dependent (an edge shared by N
// individuals is transformed N times, each step seeing the previous result).
// Concurrent read-only queries on a quiescent graph are safe.
class rggr {
 public:
  explicit rggr(gene_space space) : space_(std::move(space)) {
    const int cols = space_.num_edge_columns();
    weights_.reserve(static_cast<std::size_t>(cols));
    for (int k = 0; k < cols; ++k)
      weights_.emplace_back(static_cast<std::size_t>(space_.alphabet_size(k)) *
                                static_cast<std::size_t>(space_.alphabet_size(k + 1)),
                            1.0);
  }

  const gene_space& space() const { return space_; }
  int num_columns() const { return space_.num_edge_columns(); }
  int rows(int column) const { return space_.alphabet_size(column); }
  int cols(int column) const { return space_.alphabet_size(column + 1); }

  double weight(int column, int i, int j) const {
    return weights_[static_cast<std::size_t>(column)][flat(column, i, j)];
  }

  void set_weight(int column, int i, int j, double w) {
    if (!(w >= 0.0)) throw config_error("rggr: weights must be >= 0");
    weights_[static_cast<std::size_t>(column)][flat(column, i, j)] = w;
  }

  // Apply one generation of weight updates.  Each individual contributes
  // delta = fitness - avg_fitness; the edges of its chain are strengthened
  // when delta >= lambda, otherwise weakened with magnitude |delta - lambda|.
  // Individuals are processed in list order and each edge occurrence is one
  // sequential transform.  `counts`, when given, receives how many updates
  // landed on every edge.
  void update_from_population(std::span<const chromosome> population,
                              std::span<const double> fitness,
                              double avg_fitness, const update_params& params,
                              update_counts* counts = nullptr) {
    if (population.size() != fitness.size())
      throw config_error("update_from_population: population and fitness "
                         "lists differ in length");
    params.validate();
    for (const chromosome& c : population) space_.require(c);

    if (counts) {
      counts->assign(weights_.size(), {});
      for (std::size_t k = 0; k < weights_.size(); ++k)
        (*counts)[k].assign(weights_[k].size(), 0);
    }
    if (population.empty()) return;

    const double rho = params.resolve_rho(avg_fitness);
    for (std::size_t n = 0; n < population.size(); ++n) {
      const chromosome& genes = population[n];
      const double delta = fitness[n] - avg_fitness;
      const bool acceptable = delta >= params.lambda;
      for (int k = 0; k < num_columns(); ++k) {
        const std::size_t idx = flat(k, genes[static_cast<std::size_t>(k)],
                                     genes[static_cast<std::size_t>(k) + 1]);
        double& w = weights_[static_cast<std::size_t>(k)][idx];
        w = acceptable
                ? strengthen_edge(w, delta, rho, params, k)
                : weaken_edge(w, std::fabs(delta - params.lambda), rho, params,
                              k);
        if (counts) ++(*counts)[static_cast<std::size_t>(k)][idx];
      }
    }
  }

  // The k heaviest edges of every column, weight descending, ties broken by
  // lower (from, to).
  std::vector<std::vector<ranked_edge>> top_k_weights(int k) const {
    if (k < 1) throw config_error("top_k_weights: k must be >= 1");
    std::vector<std::vector<ranked_edge>> out;
    out.reserve(weights_.size());
    for (int column = 0; column < num_columns(); ++column) {
      std::vector<ranked_edge> edges;
      edges.reserve(weights_[static_cast<std::size_t>(column)].size());
      for (int i = 0; i < rows(column); ++i)
        for (int j = 0; j < cols(column); ++j)
          edges.push_back({i, j, weight(column, i, j)});
      std::sort(edges.begin(), edges.end(),
                [](const ranked_edge& a, const ranked_edge& b) {
                  if (a.weight != b.weight) return a.weight > b.weight;
                  if (a.from != b.from) return a.from < b.from;
                  return a.to < b.to;
                });
      if (edges.size() > static_cast<std::size_t>(k))
        edges.resize(static_cast<std::size_t>(k));
      out.push_back(std::move(edges));
    }
    return out;
  }

 private:
  std::size_t flat(int column, int i, int j) const {
    return static_cast<std::size_t>(i) *
               static_cast<std::size_t>(cols(column)) +
           static_cast<std::size_t>(j);
  }

  gene_space space_;
  std::vector<std::vector<double>> weights_;
};

inline double edge_strength(double w, const strength_params& params) {
  return 1.0 / (params.c1 + params.c2 * w);
}

namespace detail {

// Normalize edge-strength sums into locus probabilities.  An all-equal input
// short-circuits to exactly 1/K so a fresh graph gives the uniform
// distribution bit-for-bit.
inline std::vector<double> normalize_strengths(std::vector<double> s) {
  const bool all_equal =
      std::all_of(s.begin(), s.end(), [&](double x) { return x == s.front(); });
  if (all_equal) {
    std::fill(s.begin(), s.end(), 1.0 / static_cast<double>(s.size()));
    return s;
  }
  double total = 0.0;
  for (double x : s) total += x;
  for (double& x : s) x /= total;
  return s;
}

}  // namespace detail

// Probability of cutting at each edge column when crossing the two parents:
// p_k proportional to the summed strengths of both parents' edges at column
// k.  Heavily weighted (well-proven) structures get low cut probability.
inline std::vector<double> crossover_locus_probs(const rggr& graph,
                                                 const chromosome& parent_a,
                                                 const chromosome& parent_b,
                                                 const strength_params& params) {
  graph.space().require(parent_a);
  graph.space().require(parent_b);
  params.validate();
  std::vector<double> s(static_cast<std::size_t>(graph.num_columns()));
  for (int k = 0; k < graph.num_columns(); ++k) {
    const std::size_t u = static_cast<std::size_t>(k);
    s[u] = edge_strength(graph.weight(k, parent_a[u], parent_a[u + 1]), params) +
           edge_strength(graph.weight(k, parent_b[u], parent_b[u + 1]), params);
  }
  return detail::normalize_strengths(std::move(s));
}

// Probability of mutating at each edge column of one individual: p_k
// proportional to the strength of its own edge at column k.
inline std::vector<double> mutation_locus_probs(const rggr& graph,
                                                const chromosome& individual,
                                                const strength_params& params) {
  graph.space().require(individual);
  params.validate();
  std::vector<double> s(static_cast<std::size_t>(graph.num_columns()));
  for (int k = 0; k < graph.num_columns(); ++k) {
    const std::size_t u = static_cast<std::size_t>(k);
    s[u] = edge_strength(graph.weight(k, individual[u], individual[u + 1]),
                         params);
  }
  return detail::normalize_strengths(std::move(s));
}

// Draw an index distributed per `probs` by cumulative-distribution inversion.
// Deterministic given the rng state.
inline int sample_locus(std::span<const double> probs, rng_engine& rng) {
  if (probs.empty()) throw config_error("sample_locus: empty probabilities");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0))
      throw config_error("sample_locus: probabilities must be >= 0");
    total += p;
  }
  if (!(total > 0.0))
    throw config_error("sample_locus: cannot sample from all-zero vector");

  const double r = rng.next_unit() * total;
  double cum = 0.0;
  int last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0.0) last_positive = static_cast<int>(k);
    cum += probs[k];
    if (r < cum && probs[k] > 0.0) return static_cast<int>(k);
  }
  return last_positive;  // float residue past the last bucket
}

// The maximum-product chain through the graph, one allele per locus.  Ties
// resolve toward lower indices, so the result is deterministic.  Reports use
// this as the graph's dominant chain.
inline chromosome heaviest_chain(const rggr& graph) {
  const gene_space& space = graph.space();
  const int last = space.num_loci() - 1;

  std::vector<std::vector<double>> score(
      static_cast<std::size_t>(space.num_loci()));
  std::vector<std::vector<int>> parent(
      static_cast<std::size_t>(space.num_loci()));
  score[0].assign(static_cast<std::size_t>(space.alphabet_size(0)), 1.0);

  for (int k = 0; k < graph.num_columns(); ++k) {
    const std::size_t next = static_cast<std::size_t>(k) + 1;
    score[next].assign(static_cast<std::size_t>(space.alphabet_size(k + 1)),
                       -1.0);
    parent[next].assign(score[next].size(), 0);
    for (int j = 0; j < graph.cols(k); ++j)
      for (int i = 0; i < graph.rows(k); ++i) {
        const double cand =
            score[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
            graph.weight(k, i, j);
        if (cand > score[next][static_cast<std::size_t>(j)]) {
          score[next][static_cast<std::size_t>(j)] = cand;
          parent[next][static_cast<std::size_t>(j)] = i;
        }
      }
  }

  chromosome chain(static_cast<std::size_t>(space.num_loci()));
  const auto& final_scores = score[static_cast<std::size_t>(last)];
  chain[static_cast<std::size_t>(last)] = static_cast<int>(
      std::max_element(final_scores.begin(), final_scores.end()) -
      final_scores.begin());
  for (int k = last; k > 0; --k)
    chain[static_cast<std::size_t>(k) - 1] =
        parent[static_cast<std::size_t>(k)]
              [static_cast<std::size_t>(chain[static_cast<std::size_t>(k)])];
  return chain;
}

}  // namespace grga
