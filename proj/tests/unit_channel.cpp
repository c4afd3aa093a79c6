#include <catch2/catch_amalgamated.hpp>

#include "avmac/channel.hpp"
#include "test_helpers.hpp"

using namespace avmac;

TEST_CASE("uniform kernel validates") {
  std::vector<double> w(16, 0.5);
  auto ch = validate_channel(w, 2, 2, 2, 2);
  REQUIRE(ch.x_size == 2);
  REQUIRE(ch(1, 0, 1, 1) == 0.5);
  REQUIRE_FALSE(ch.exact());
}

TEST_CASE("row sum mismatch names the row") {
  std::vector<double> w(16, 0.5);
  w[0] = 0.4;  // row (0,0,0) now sums to 0.9
  try {
    validate_channel(w, 2, 2, 2, 2);
    FAIL("expected RowSumMismatch");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::row_sum_mismatch);
    REQUIRE(std::string(e.what()).find("x=0, y=0, s=0") != std::string::npos);
  }
}

TEST_CASE("negative entries and bad dimensions rejected") {
  std::vector<double> w(16, 0.5);
  w[3] = -0.1;
  w[2] = 1.1;
  REQUIRE_THROWS_AS(validate_channel(w, 2, 2, 2, 2), Error);
  REQUIRE_THROWS_AS(validate_channel(std::vector<double>(15, 0.5), 2, 2, 2, 2), Error);
  REQUIRE_THROWS_AS(validate_channel(std::vector<double>(0), 2, 2, 0, 2), Error);
}

TEST_CASE("deterministic XOR kernel validates exactly") {
  auto ch = testutil::xor_channel();
  REQUIRE(ch.exact());
  REQUIRE(ch(0, 1, 1, 0) == 1.0);
  REQUIRE(ch.exact_at(0, 1, 1, 0) == Rat(1));
}

TEST_CASE("state averaging") {
  auto ch = testutil::xor_channel();
  SECTION("uniform jamming flattens the output") {
    auto avg = average_under_state(ch, Dist::uniform(2));
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) REQUIRE(avg(x, y, z) == Catch::Approx(0.5));
  }
  SECTION("point mass picks the slice") {
    auto avg = average_under_state(ch, Dist::point_mass(2, 1));
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) REQUIRE(avg(x, y, z) == ch(x, y, 1, z));
  }
  SECTION("weighted sum") {
    auto avg = average_under_state(ch, Dist(std::vector<double>{0.75, 0.25}));
    REQUIRE(avg(0, 0, 0) == Catch::Approx(0.75));
  }
  SECTION("size mismatch") { REQUIRE_THROWS_AS(average_under_state(ch, Dist::uniform(3)), Error); }
}

TEST_CASE("averaging is affine in the state distribution") {
  Prng rng(11);
  auto ch = testutil::random_channel(rng, 2, 3, 3, 2);
  auto q1 = Dist(testutil::random_simplex(rng, 3));
  auto q2 = Dist(testutil::random_simplex(rng, 3));
  std::vector<double> mid(3);
  for (int s = 0; s < 3; ++s) mid[std::size_t(s)] = 0.5 * (q1[s] + q2[s]);
  auto a1 = average_under_state(ch, q1);
  auto a2 = average_under_state(ch, q2);
  auto am = average_under_state(ch, Dist(mid));
  for (std::size_t i = 0; i < am.w.size(); ++i)
    REQUIRE(am.w[i] == Catch::Approx(0.5 * (a1.w[i] + a2.w[i])).margin(1e-12));
}

TEST_CASE("n-fold probabilities") {
  auto ch = testutil::xor_channel();
  REQUIRE(nfold_prob(ch, {0, 1}, {1, 1}, {1, 0}, {0, 0}) == 1.0);
  REQUIRE(nfold_prob(ch, {0, 1}, {1, 1}, {1, 0}, {1, 0}) == 0.0);

  std::vector<double> uni(16, 0.5);
  auto u = validate_channel(uni, 2, 2, 2, 2);
  REQUIRE(nfold_prob(u, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}, {1, 0, 1}) == Catch::Approx(0.125));

  REQUIRE_THROWS_AS(nfold_prob(ch, {0, 1}, {1}, {1, 0}, {0, 0}), Error);
  REQUIRE_THROWS_AS(nfold_prob(ch, {0, 2}, {1, 1}, {1, 0}, {0, 0}), Error);
}

TEST_CASE("n-fold probabilities sum to one over all outputs") {
  Prng rng(5);
  auto ch = testutil::random_channel(rng, 2, 2, 2, 3);
  const int n = 4;
  std::vector<int> xs(n), ys(n), ss(n);
  for (int t = 0; t < n; ++t) {
    xs[std::size_t(t)] = rng.next_int(2);
    ys[std::size_t(t)] = rng.next_int(2);
    ss[std::size_t(t)] = rng.next_int(2);
  }
  double total = 0.0;
  std::vector<int> z(n, 0);
  for (;;) {
    total += nfold_prob(ch, xs, ys, ss, z);
    int t = n;
    while (t > 0) {
      if (++z[std::size_t(t - 1)] < 3) break;
      z[std::size_t(t - 1)] = 0;
      --t;
    }
    if (t == 0) break;
  }
  REQUIRE(total == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("channel files round-trip") {
  SECTION("rational entries round-trip bit-exactly") {
    auto ch = testutil::swap_channel();
    auto text = serialize_channel(ch);
    auto back = parse_channel(text);
    REQUIRE(back == ch);
    REQUIRE(serialize_channel(back) == text);
  }
  SECTION("float entries round-trip through shortest representation") {
    Prng rng(3);
    auto ch = testutil::random_channel(rng, 2, 2, 2, 2);
    auto back = parse_channel(serialize_channel(ch));
    REQUIRE(back == ch);
  }
  SECTION("p/q strings are parsed exactly") {
    std::string text = R"({"x":["0","1"],"y":["0"],"s":["0"],"z":["0","1"],
      "w":[[[["1/3","2/3"]]],[[["2/5","3/5"]]]]})";
    auto ch = parse_channel(text);
    REQUIRE(ch.exact());
    REQUIRE(ch.exact_at(0, 0, 0, 0) == Rat(1) / 3);
    auto back = parse_channel(serialize_channel(ch));
    REQUIRE(back == ch);
  }
  SECTION("missing z column is a dimension error") {
    std::string text = R"({"x":["0","1"],"y":["0"],"s":["0"],"z":["0","1"],
      "w":[[[["1/3"]]],[[["2/5","3/5"]]]]})";
    try {
      parse_channel(text);
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::dimension_mismatch);
    }
  }
  SECTION("exact rows must sum to exactly one") {
    std::string text = R"({"x":["0"],"y":["0"],"s":["0"],"z":["0","1"],
      "w":[[[["1/3","1/3"]]]]})";
    REQUIRE_THROWS_AS(parse_channel(text), Error);
  }
  SECTION("syntax errors carry the parser locus") {
    REQUIRE_THROWS_AS(parse_channel("{not json"), Error);
  }
}
