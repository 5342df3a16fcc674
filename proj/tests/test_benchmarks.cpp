#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "grga/benchmarks.hpp"
#include "grga/random.hpp"

using namespace grga;

namespace {

// Second evaluator used as the correctness oracle: long double accumulation,
// summation in reverse order, explicit negation at the end.
double shubert_reference(const std::vector<double>& x) {
  long double product = 1.0L;
  for (auto it = x.rbegin(); it != x.rend(); ++it) {
    long double inner = 0.0L;
    for (int j = 5; j >= 1; --j)
      inner += static_cast<long double>(j) *
               std::cos(static_cast<long double>(j + 1) *
                            static_cast<long double>(*it) +
                        static_cast<long double>(j));
    product *= inner;
  }
  return static_cast<double>(-product);
}

}  // namespace

TEST_CASE("shubert matches frozen oracle values", "[benchmarks]") {
  // -(sum_j j*cos(j))^3, computed with an independent scalar evaluator.
  REQUIRE_THAT(shubert(std::vector<double>{0.0, 0.0, 0.0}),
               Catch::Matchers::WithinAbs(88.61109740764357, 1e-9));

  SECTION("coordinate permutations cannot change the product") {
    const std::vector<double> abc{1.25, -3.5, 7.0};
    const std::vector<double> bac{-3.5, 1.25, 7.0};
    REQUIRE(shubert(abc) == shubert(bac));
  }
}

TEST_CASE("shubert agrees with an independently coded evaluator", "[benchmarks]") {
  rng_engine rng(20240817);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(3);
    for (double& xi : x) xi = -10.0 + 20.0 * rng.next_unit();
    REQUIRE_THAT(shubert(x),
                 Catch::Matchers::WithinAbs(shubert_reference(x), 1e-9));
  }
}

TEST_CASE("decode_bin reproduces the worked bin values", "[benchmarks]") {
  const discretized_box box{3, -10.0, 10.0, 60};
  REQUIRE_THAT(decode_bin(7, box, 0),
               Catch::Matchers::WithinAbs(-23.0 / 3.0, 1e-12));
  REQUIRE(decode_bin(0, box, 1) == -10.0);
  REQUIRE(decode_bin(30, box, 2) == 0.0);
  REQUIRE(decode_bin(9, box, 2) == -7.0);

  SECTION("out-of-range bins and dims are rejected") {
    REQUIRE_THROWS_AS(decode_bin(60, box, 0), config_error);
    REQUIRE_THROWS_AS(decode_bin(-1, box, 0), config_error);
    REQUIRE_THROWS_AS(decode_bin(0, box, 3), config_error);
  }
}

TEST_CASE("decode_bin is affine and strictly increasing", "[benchmarks]") {
  const discretized_box box{2, -4.0, 14.0, 37};
  const double step = (box.hi - box.lo) / box.bins;
  double prev = decode_bin(0, box, 0);
  REQUIRE(prev == box.lo);
  for (int b = 1; b < box.bins; ++b) {
    const double x = decode_bin(b, box, 0);
    REQUIRE(x > prev);
    REQUIRE_THAT(x - prev, Catch::Matchers::WithinAbs(step, 1e-12));
    prev = x;
  }
}

TEST_CASE("grid oracle finds the full-grid optimum", "[benchmarks]") {
  const discretized_box box{3, -10.0, 10.0, 60};
  const grid_result grid = grid_oracle(box);

  REQUIRE(grid.sorted_values.size() == 216000);
  REQUIRE(grid.best_bins == std::vector<int>{7, 9, 9});
  REQUIRE_THAT(grid.best_value,
               Catch::Matchers::WithinAbs(2241.9588539195265, 1e-6));
  REQUIRE(grid.best_value <= 2709.0935 + 1e-6);

  SECTION("quantile(1.0) is the maximum by definition") {
    REQUIRE(grid.quantile(1.0) == grid.best_value);
  }

  SECTION("the decoded (-23/3, -7, -7) lands in the top 0.1% of the grid") {
    const double v =
        shubert(std::vector<double>{-23.0 / 3.0, -7.0, -7.0});
    REQUIRE(v >= grid.quantile(0.999));
  }

  SECTION("local refinement reaches the continuous maximum") {
    const auto [point, value] = refine_local_max(box, grid.best_bins);
    REQUIRE_THAT(value, Catch::Matchers::WithinAbs(2709.0935, 0.01));
  }
}

TEST_CASE("grid oracle degenerate and guarded cases", "[benchmarks]") {
  SECTION("a single cell is its own optimum") {
    const discretized_box box{2, -1.0, 1.0, 1};
    const grid_result grid = grid_oracle(box);
    REQUIRE(grid.best_bins == std::vector<int>{0, 0});
    REQUIRE(grid.sorted_values.size() == 1);
    REQUIRE(grid.best_value ==
            shubert(std::vector<double>{-1.0, -1.0}));
  }

  SECTION("cell budget is enforced") {
    const discretized_box box{3, -10.0, 10.0, 500};
    REQUIRE_THROWS_AS(grid_oracle(box), config_error);
  }
}

TEST_CASE("shubert fitness decodes chromosomes before evaluating",
          "[benchmarks]") {
  const discretized_box box{3, -10.0, 10.0, 60};
  const fitness_function fitness = shubert_fitness(box);

  REQUIRE_THAT(fitness({7, 9, 9}),
               Catch::Matchers::WithinAbs(2241.9588539195265, 1e-9));
  REQUIRE_THAT(fitness({0, 0, 0}),
               Catch::Matchers::WithinAbs(
                   shubert_reference({-10.0, -10.0, -10.0}), 1e-9));

  SECTION("permuted chromosomes give the permuted-coordinate value") {
    REQUIRE(fitness({7, 9, 9}) == fitness({9, 7, 9}));
  }

  SECTION("length mismatches are rejected") {
    REQUIRE_THROWS_AS(fitness({1, 2}), config_error);
  }
}

TEST_CASE("smoke-test surfaces behave at their optima", "[benchmarks]") {
  REQUIRE(sphere(std::vector<double>{0.0, 0.0}) == 0.0);
  REQUIRE_THAT(rastrigin(std::vector<double>{0.0, 0.0, 0.0}),
               Catch::Matchers::WithinAbs(0.0, 1e-9));

  const discretized_box box{2, -5.0, 5.0, 10};
  const fitness_function f = negated_fitness(box, sphere);
  // bin 5 decodes to 0, the sphere optimum.
  REQUIRE(f({5, 5}) == 0.0);
  REQUIRE(f({0, 0}) < f({5, 5}));
}

TEST_CASE("box validation", "[benchmarks]") {
  REQUIRE_THROWS_AS((discretized_box{0, -1.0, 1.0, 5}).validate(),
                    config_error);
  REQUIRE_THROWS_AS((discretized_box{2, 1.0, -1.0, 5}).validate(),
                    config_error);
  REQUIRE_THROWS_AS((discretized_box{2, -1.0, 1.0, 0}).validate(),
                    config_error);
}
