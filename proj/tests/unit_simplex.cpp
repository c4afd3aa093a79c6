#include <catch2/catch_amalgamated.hpp>

#include "avmac/simplex.hpp"

using namespace avmac;

TEST_CASE("basic minimization") {
  // min x1 s.t. x1 + x2 = 1
  DenseSimplex<double> lp({{1, 1}}, {1}, {1, 0});
  auto out = lp.run();
  REQUIRE(out.feasible);
  REQUIRE(out.objective == Catch::Approx(0.0).margin(1e-10));
  REQUIRE(out.x[1] == Catch::Approx(1.0));
}

TEST_CASE("infeasible system detected") {
  // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold
  DenseSimplex<double> lp({{1, 1}, {1, 1}}, {1, 2}, {0, 0});
  auto out = lp.run();
  REQUIRE_FALSE(out.feasible);
}

TEST_CASE("negative right-hand sides handled by row flips") {
  // -x1 = -0.25  =>  x1 = 0.25
  DenseSimplex<double> lp({{-1, 0}, {1, 1}}, {-0.25, 1}, {0, 1});
  auto out = lp.run();
  REQUIRE(out.feasible);
  REQUIRE(out.x[0] == Catch::Approx(0.25));
  REQUIRE(out.objective == Catch::Approx(0.75));
}

TEST_CASE("min-max residual gadget") {
  // variables: x, t, s+, s-, with x fixed by x = 0.3 and the pair
  //   (x - 0.5) - t + s+ = 0,  -(x - 0.5) - t + s- = 0
  // optimum t = |0.3 - 0.5| = 0.2
  std::vector<std::vector<double>> a = {
      {1, 0, 0, 0},        // x = 0.3
      {1, -1, 1, 0},       // x - t + s+ = 0.5
      {-1, -1, 0, 1},      // -x - t + s- = -0.5
  };
  DenseSimplex<double> lp(a, {0.3, 0.5, -0.5}, {0, 1, 0, 0});
  auto out = lp.run();
  REQUIRE(out.feasible);
  REQUIRE(out.objective == Catch::Approx(0.2).margin(1e-9));
}

TEST_CASE("exact rational arithmetic") {
  // min x2 s.t. x1/3 + x2 = 1/3, x1 + x2 + x3 = 1
  std::vector<std::vector<Rat>> a = {{Rat(1, 3), Rat(1), Rat(0)}, {Rat(1), Rat(1), Rat(1)}};
  DenseSimplex<Rat> lp(a, {Rat(1, 3), Rat(1)}, {Rat(0), Rat(1), Rat(0)});
  auto out = lp.run();
  REQUIRE(out.feasible);
  REQUIRE(out.objective == Rat(0));
  REQUIRE(out.x[0] == Rat(1));  // x1 = 1 satisfies both rows with x2 = 0
  REQUIRE(out.x[2] == Rat(0));
}

TEST_CASE("degenerate program terminates") {
  // many redundant rows pinning the same point
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (int i = 0; i < 12; ++i) {
    a.push_back({1, 1, 0});
    b.push_back(1);
  }
  a.push_back({0, 1, 1});
  b.push_back(1);
  DenseSimplex<double> lp(a, b, {1, 0, 2});
  auto out = lp.run();
  REQUIRE(out.feasible);
  REQUIRE(out.objective == Catch::Approx(0.0).margin(1e-9));
}
