#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "avmac/types.hpp"
#include "test_helpers.hpp"

using namespace avmac;

namespace {

JointDist bern(double p) { return JointDist::validated({{"b", 2}}, {1.0 - p, p}); }

JointDist random_joint(Prng& rng, std::vector<Axis> axes) {
  std::size_t cells = 1;
  for (auto& a : axes) cells *= std::size_t(a.size);
  return JointDist::validated(std::move(axes), testutil::random_simplex(rng, int(cells)));
}

}  // namespace

TEST_CASE("joint types count cells") {
  auto j = joint_type({{{"x", 2}, {0, 0, 1}}, {{"y", 2}, {1, 0, 1}}});
  REQUIRE(j.denominator == 3);
  REQUIRE(j.table[1] == Catch::Approx(1.0 / 3));  // (0,1)
  REQUIRE(j.table[0] == Catch::Approx(1.0 / 3));  // (0,0)
  REQUIRE(j.table[3] == Catch::Approx(1.0 / 3));  // (1,1)
  REQUIRE(j.table[2] == 0.0);

  auto point = joint_type({{{"x", 2}, {0, 0, 0, 0}}});
  REQUIRE(point.table[0] == 1.0);

  auto balanced = joint_type({{{"x", 2}, {0, 0, 1, 1}}, {{"y", 2}, {0, 1, 0, 1}}});
  for (double v : balanced.table) REQUIRE(v == Catch::Approx(0.25));

  REQUIRE_THROWS_AS(joint_type({{{"x", 2}, {0, 1}}, {{"y", 2}, {0}}}), Error);
  REQUIRE_THROWS_AS(joint_type({{{"x", 2}, {0, 2}}}), Error);
}

TEST_CASE("type entries are multiples of 1/n") {
  Prng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 1 + rng.next_int(8);
    std::vector<int> xs(std::size_t(n), 0), ys(std::size_t(n), 0);
    for (int t = 0; t < n; ++t) {
      xs[std::size_t(t)] = rng.next_int(3);
      ys[std::size_t(t)] = rng.next_int(2);
    }
    auto j = joint_type({{{"x", 3}, xs}, {{"y", 2}, ys}});
    for (double v : j.table) {
      double scaled = v * n;
      REQUIRE(std::fabs(scaled - std::round(scaled)) < 1e-9);
    }
  }
}

TEST_CASE("divergence basics") {
  auto p = bern(0.5);
  REQUIRE(divergence(p, p) == 0.0);
  REQUIRE(divergence(bern(0.5), bern(0.25)) == Catch::Approx(0.2075187496).epsilon(1e-6));
  REQUIRE(std::isinf(divergence(bern(0.5), bern(0.0))));
  REQUIRE_THROWS_AS(divergence(p, JointDist::validated({{"t", 3}}, {0.2, 0.3, 0.5})), Error);
}

TEST_CASE("divergence is nonnegative, zero only at equality") {
  Prng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    auto p = random_joint(rng, {{"a", 2}, {"b", 3}});
    auto q = random_joint(rng, {{"a", 2}, {"b", 3}});
    double d = divergence(p, q);
    REQUIRE(d >= 0.0);
    if (d < 1e-12) {
      for (std::size_t i = 0; i < p.table.size(); ++i)
        REQUIRE(p.table[i] == Catch::Approx(q.table[i]).margin(1e-5));
    }
  }
}

TEST_CASE("variational distance") {
  auto p = bern(0.5);
  REQUIRE(variational_distance(p, p) == 0.0);
  auto a = JointDist::validated({{"t", 3}}, {1, 0, 0});
  auto b = JointDist::validated({{"t", 3}}, {0, 0, 1});
  REQUIRE(variational_distance(a, b) == Catch::Approx(2.0));
  REQUIRE(variational_distance(bern(0.5), bern(0.25)) == Catch::Approx(0.5));
}

TEST_CASE("Pinsker bound on random pairs") {
  Prng rng(29);
  for (int rep = 0; rep < 300; ++rep) {
    auto p = random_joint(rng, {{"a", 4}});
    auto q = random_joint(rng, {{"a", 4}});
    double d = variational_distance(p, q);
    double kl = divergence(p, q);
    REQUIRE((d / 2) * (d / 2) <= (std::log(2.0) / 2.0) * kl + 1e-12);
  }
}

TEST_CASE("mutual information examples") {
  SECTION("independent bits") {
    auto j = JointDist::validated({{"x", 2}, {"z", 2}}, {0.25, 0.25, 0.25, 0.25});
    REQUIRE(mutual_information(j, {0}, {1}) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("copied bit") {
    auto j = JointDist::validated({{"x", 2}, {"z", 2}}, {0.5, 0.0, 0.0, 0.5});
    REQUIRE(mutual_information(j, {0}, {1}) == Catch::Approx(1.0));
  }
  SECTION("adder output") {
    // X, Y uniform independent bits, Z = X + Y
    std::vector<double> t(12, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) t[std::size_t((x * 2 + y) * 3 + x + y)] = 0.25;
    auto j = JointDist::validated({{"x", 2}, {"y", 2}, {"z", 3}}, t);
    REQUIRE(mutual_information(j, {0, 1}, {2}) == Catch::Approx(1.5).margin(1e-9));
    REQUIRE(mutual_information(j, {0}, {2}, {1}) == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("overlapping groups rejected") {
    auto j = JointDist::validated({{"x", 2}, {"z", 2}}, {0.25, 0.25, 0.25, 0.25});
    REQUIRE_THROWS_AS(mutual_information(j, {0}, {0}), Error);
  }
}

TEST_CASE("chain rule on random joints") {
  Prng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    auto j = random_joint(rng, {{"x", 2}, {"y", 3}, {"z", 2}});
    double lhs = mutual_information(j, {0, 1}, {2});
    double rhs = mutual_information(j, {1}, {2}) + mutual_information(j, {0}, {2}, {1});
    REQUIRE(lhs == Catch::Approx(rhs).margin(1e-12));
  }
}

TEST_CASE("mutual information is invariant under symbol relabeling") {
  Prng rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    auto j = random_joint(rng, {{"x", 3}, {"z", 3}});
    // swap symbols 0 and 2 on the z axis
    auto relabeled = j;
    for (int x = 0; x < 3; ++x) std::swap(relabeled.table[std::size_t(x * 3)], relabeled.table[std::size_t(x * 3 + 2)]);
    REQUIRE(mutual_information(j, {0}, {1}) ==
            Catch::Approx(mutual_information(relabeled, {0}, {1})).margin(1e-12));
  }
}

TEST_CASE("marginals preserve mass and order") {
  Prng rng(41);
  auto j = random_joint(rng, {{"x", 2}, {"y", 3}, {"z", 2}});
  auto m = j.marginal({2, 0});
  REQUIRE(m.axes[0].name == "z");
  REQUIRE(m.axes[1].name == "x");
  double total = 0.0;
  for (double v : m.table) total += v;
  REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
  // spot value: P(z=1, x=0) from the full table
  double want = 0.0;
  for (int y = 0; y < 3; ++y) want += j.table[std::size_t((0 * 3 + y) * 2 + 1)];
  REQUIRE(m.table[std::size_t(1 * 2 + 0)] == Catch::Approx(want).margin(1e-12));
}
