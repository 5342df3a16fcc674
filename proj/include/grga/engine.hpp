#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "grga/errors.hpp"
#include "grga/gene_space.hpp"
#include "grga/random.hpp"
#include "grga/rggr.hpp"

namespace grga {

enum class ga_mode { grga, baseline };
enum class selection_scheme { tournament, roulette_wheel };
enum class mutation_endpoint { downstream, upstream };
enum class termination_reason { stall, max_generations };

// Maximizing fitness evaluator.  Must be deterministic for a given
// chromosome within one run; minimization problems are wrapped by negation
// at the application layer.
using fitness_function = std::function<double(const chromosome&)>;

struct ga_config {
  int population_size = 200;
  double mutation_rate = 0.05;  // per-individual chance of one mutation event
  double crossover_rate = 1.0;
  int max_generations = 30;
  int stall_generations = 10;
  int elitism_count = 1;
  // Fitness-proportional selection by default: with rank-insensitive
  // pressure the guided loci are what drives convergence, which keeps the
  // guided-vs-uniform comparison informative.  Tournament(k) is available
  // for stronger pressure.
  selection_scheme selection = selection_scheme::roulette_wheel;
  int tournament_size = 2;
  // Which endpoint of the sampled edge the mutation rewrites.  Downstream
  // (gene k+1) lets a weak edge be repaired by changing its successor.
  mutation_endpoint mutate_end = mutation_endpoint::downstream;
  std::uint64_t seed = 0;
  ga_mode mode = ga_mode::grga;

  void validate() const {
    if (population_size < 2)
      throw config_error("ga_config: population_size must be >= 2");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
      throw config_error("ga_config: mutation_rate must be in [0, 1]");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
      throw config_error("ga_config: crossover_rate must be in [0, 1]");
    if (max_generations < 1)
      throw config_error("ga_config: max_generations must be >= 1");
    if (stall_generations < 1)
      throw config_error("ga_config: stall_generations must be >= 1");
    if (elitism_count < 0 || elitism_count >= population_size)
      throw config_error(
          "ga_config: elitism_count must be in [0, population_size)");
    if (selection == selection_scheme::tournament && tournament_size < 2)
      throw config_error("ga_config: tournament size must be >= 2");
  }
};

struct generation_row {
  int generation = 0;
  double best_fitness = 0.0;
  double avg_fitness = 0.0;

  bool operator==(const generation_row&) const = default;
};

// Complete trace of one run: per-generation population statistics, the best
// individual ever seen, and (GRGA mode only) the final relationship graph.
struct run_record {
  std::vector<generation_row> rows;
  chromosome best_chromosome;
  double best_fitness = 0.0;
  termination_reason reason = termination_reason::max_generations;
  std::optional<rggr> final_rggr;
};

// Splice two parents at an edge column: cut between genes `cut` and `cut+1`.
inline std::pair<chromosome, chromosome> single_point_crossover(
    const chromosome& parent_a, const chromosome& parent_b, int cut) {
  if (parent_a.size() != parent_b.size())
    throw config_error("single_point_crossover: parents differ in length");
  if (cut < 0 || static_cast<std::size_t>(cut) + 1 >= parent_a.size())
    throw config_error("single_point_crossover: cut out of range");
  chromosome child_a = parent_a;
  chromosome child_b = parent_b;
  for (std::size_t k = static_cast<std::size_t>(cut) + 1; k < parent_a.size();
       ++k) {
    child_a[k] = parent_b[k];
    child_b[k] = parent_a[k];
  }
  return {std::move(child_a), std::move(child_b)};
}

// Rewrite one endpoint of edge `edge_index` with a uniformly random different
// allele from that locus's alphabet.  A single-symbol alphabet leaves the
// chromosome unchanged.
inline chromosome mutate_at(const chromosome& individual, int edge_index,
                            rng_engine& rng, const gene_space& space,
                            mutation_endpoint endpoint =
                                mutation_endpoint::downstream) {
  if (edge_index < 0 || edge_index >= space.num_edge_columns())
    throw config_error("mutate_at: edge index out of range");
  space.require(individual);
  const int locus =
      endpoint == mutation_endpoint::downstream ? edge_index + 1 : edge_index;
  const int n = space.alphabet_size(locus);
  if (n == 1) return individual;

  chromosome mutated = individual;
  // Draw over the n-1 alternatives, skipping the current allele.
  auto draw = static_cast<int>(rng.next_index(static_cast<std::size_t>(n - 1)));
  if (draw >= mutated[static_cast<std::size_t>(locus)]) ++draw;
  mutated[static_cast<std::size_t>(locus)] = draw;
  return mutated;
}

namespace detail {

// Best of `tournament_size` distinct draws (clamped to the population), so a
// full-size tournament is exhaustive.  Fitness ties keep the earliest draw.
inline std::size_t tournament_pick(std::span<const double> fitness,
                                   int tournament_size, rng_engine& rng) {
  const std::size_t n = fitness.size();
  const std::size_t k = std::min(static_cast<std::size_t>(tournament_size), n);
  std::vector<std::size_t> drawn;
  drawn.reserve(k);
  std::size_t best = 0;
  while (drawn.size() < k) {
    const std::size_t candidate = rng.next_index(n);
    bool seen = false;
    for (std::size_t d : drawn) seen = seen || d == candidate;
    if (seen) continue;
    if (drawn.empty() || fitness[candidate] > fitness[best]) best = candidate;
    drawn.push_back(candidate);
  }
  return best;
}

// Roulette weights: fitness shifted so the worst individual keeps a small
// positive mass (1% of the observed range); a flat population degenerates to
// the uniform draw.
inline std::vector<double> roulette_weights(std::span<const double> fitness) {
  const auto [lo, hi] = std::minmax_element(fitness.begin(), fitness.end());
  std::vector<double> w(fitness.size(), 1.0);
  if (*hi > *lo) {
    const double floor_mass = 0.01 * (*hi - *lo);
    for (std::size_t i = 0; i < fitness.size(); ++i)
      w[i] = (fitness[i] - *lo) + floor_mass;
  }
  return w;
}

inline std::size_t roulette_pick(std::span<const double> weights,
                                 rng_engine& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double r = rng.next_unit() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (r < cum) return i;
  }
  return weights.size() - 1;
}

}  // namespace detail

// Pick two parents.  Tournament: each parent is the best of `size` distinct
// uniform draws.  Roulette: probability proportional to range-shifted fitness.
inline std::pair<chromosome, chromosome> select_parents(
    std::span<const chromosome> population, std::span<const double> fitness,
    const ga_config& config, rng_engine& rng) {
  if (population.empty())
    throw config_error("select_parents: empty population");
  if (config.selection == selection_scheme::tournament) {
    const std::size_t a =
        detail::tournament_pick(fitness, config.tournament_size, rng);
    const std::size_t b =
        detail::tournament_pick(fitness, config.tournament_size, rng);
    return {population[a], population[b]};
  }
  const std::vector<double> w = detail::roulette_weights(fitness);
  return {population[detail::roulette_pick(w, rng)],
          population[detail::roulette_pick(w, rng)]};
}

namespace detail {

inline double evaluate_or_abort(const fitness_function& fitness,
                                const chromosome& c, int generation) {
  try {
    return fitness(c);
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "fitness evaluation failed at generation " << generation
        << " for chromosome [";
    for (std::size_t k = 0; k < c.size(); ++k)
      msg << (k ? "," : "") << c[k];
    msg << "]: " << e.what();
    throw run_error(msg.str());
  }
}

// Indices of the `count` fittest individuals, ties toward lower index.
inline std::vector<std::size_t> elite_indices(std::span<const double> fitness,
                                              int count) {
  std::vector<std::size_t> order(fitness.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(),
                    order.begin() + std::min<std::size_t>(
                                        static_cast<std::size_t>(count),
                                        order.size()),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (fitness[a] != fitness[b])
                        return fitness[a] > fitness[b];
                      return a < b;
                    });
  order.resize(static_cast<std::size_t>(count));
  return order;
}

}  // namespace detail

// The generational loop.  Evaluates the random initial population as
// generation 0, then per generation: (GRGA) update the relationship graph
// from fitness, breed via selection + crossover + mutation with loci sampled
// from the graph (GRGA) or uniformly (baseline), carry over the elite, and
// stop on a stalled best fitness or the generation cap.  Identical
// (config, seed) pairs produce identical records.
inline run_record evolve(const ga_config& config, const gene_space& space,
                         const fitness_function& fitness,
                         const update_params& update,
                         const strength_params& strength) {
  config.validate();
  update.validate();
  strength.validate();
  if (!fitness) throw config_error("evolve: fitness function not set");

  const bool guided = config.mode == ga_mode::grga;
  const int num_cuts = space.num_edge_columns();
  rng_engine rng(config.seed);

  std::vector<chromosome> population;
  population.reserve(static_cast<std::size_t>(config.population_size));
  for (int i = 0; i < config.population_size; ++i)
    population.push_back(space.random_chromosome(rng));

  std::vector<double> fits(population.size());
  auto evaluate = [&](int generation) {
    for (std::size_t i = 0; i < population.size(); ++i)
      fits[i] = detail::evaluate_or_abort(fitness, population[i], generation);
  };

  run_record record;
  std::optional<rggr> graph;
  if (guided) graph.emplace(space);

  auto record_generation = [&](int generation) {
    const std::size_t best_idx = static_cast<std::size_t>(
        std::max_element(fits.begin(), fits.end()) - fits.begin());
    const double avg =
        std::accumulate(fits.begin(), fits.end(), 0.0) /
        static_cast<double>(fits.size());
    record.rows.push_back({generation, fits[best_idx], avg});
    if (record.rows.size() == 1 || fits[best_idx] > record.best_fitness) {
      record.best_fitness = fits[best_idx];
      record.best_chromosome = population[best_idx];
    }
  };

  auto stalled = [&]() {
    const std::size_t window =
        static_cast<std::size_t>(config.stall_generations) + 1;
    if (record.rows.size() < window) return false;
    const double latest = record.rows.back().best_fitness;
    for (std::size_t i = record.rows.size() - window; i < record.rows.size();
         ++i)
      if (record.rows[i].best_fitness != latest) return false;
    return true;
  };

  evaluate(0);
  record_generation(0);

  for (int g = 1; g <= config.max_generations && !stalled(); ++g) {
    if (guided) {
      const double avg = record.rows.back().avg_fitness;
      graph->update_from_population(population, fits, avg, update);
    }

    std::vector<chromosome> next;
    next.reserve(population.size());
    for (std::size_t idx :
         detail::elite_indices(fits, config.elitism_count))
      next.push_back(population[idx]);

    while (next.size() < population.size()) {
      auto [child_a, child_b] =
          select_parents(population, fits, config, rng);
      if (rng.next_unit() < config.crossover_rate) {
        const int cut =
            guided ? sample_locus(
                         crossover_locus_probs(*graph, child_a, child_b,
                                               strength),
                         rng)
                   : static_cast<int>(
                         rng.next_index(static_cast<std::size_t>(num_cuts)));
        std::tie(child_a, child_b) =
            single_point_crossover(child_a, child_b, cut);
      }
      for (chromosome* child : {&child_a, &child_b}) {
        if (next.size() >= population.size()) break;
        if (rng.next_unit() < config.mutation_rate) {
          const int edge =
              guided ? sample_locus(
                           mutation_locus_probs(*graph, *child, strength), rng)
                     : static_cast<int>(
                           rng.next_index(static_cast<std::size_t>(num_cuts)));
          *child = mutate_at(*child, edge, rng, space, config.mutate_end);
        }
        next.push_back(std::move(*child));
      }
    }

    population = std::move(next);
    evaluate(g);
    record_generation(g);
  }

  record.reason = stalled() ? termination_reason::stall
                            : termination_reason::max_generations;
  if (guided) record.final_rggr = std::move(graph);
  return record;
}

}  // namespace grga
