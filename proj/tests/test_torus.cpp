#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <string>

#include "qcw/torus.hpp"
#include "support.hpp"

using namespace qcw;

namespace {

// Length recurrence for the default automorphism: images are positive, so
// |phi^n(a)| = |phi^(n-2)(a)| + |phi^(n-3)(a)|.
std::vector<std::size_t> recurrence_lengths(std::size_t n_max) {
  std::vector<std::size_t> l = {1, 1, 1};
  while (l.size() <= n_max) {
    auto n = l.size();
    l.push_back(l[n - 2] + l[n - 3]);
  }
  l.resize(n_max + 1);
  return l;
}

// Iterates a -> b, b -> c, c -> ab on plain strings.
std::string substitute_text(std::string const& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case 'a':
        out += 'b';
        break;
      case 'b':
        out += 'c';
        break;
      case 'c':
        out += "ab";
        break;
      default:
        throw std::logic_error("unexpected letter");
    }
  }
  return out;
}

TorusElement el(TorusGroup const& g, char const* u, std::int64_t k) {
  return {parse_word(g.base().alphabet(), u), k};
}

}  // namespace

TEST_CASE("automorphism application") {
  auto g = default_free_torus();
  auto const& f = g.base().alphabet();
  CHECK(g.apply(Word{}, Direction::forward).empty());
  CHECK(g.apply(parse_word(f, "a b"), Direction::forward) == parse_word(f, "b c"));
  CHECK(g.apply(parse_word(f, "b"), Direction::backward) == parse_word(f, "a"));
  CHECK(g.apply(parse_word(f, "a"), Direction::backward) == parse_word(f, "c A"));
  CHECK(g.power_apply(0, parse_word(f, "a B")) == parse_word(f, "a B"));
  CHECK(g.power_apply(3, parse_word(f, "a")) == parse_word(f, "a b"));
  CHECK(g.power_apply(10, parse_word(f, "a")).size() == 12);
  CHECK(g.power_apply(-3, parse_word(f, "a b")) == parse_word(f, "a"));
  CHECK_THROWS_AS(Automorphism::parse(f, {"b", "c", "x"}, {"cA", "a", "b"}), AlphabetError);
}

TEST_CASE("automorphism is a homomorphism and inverts") {
  auto g = default_free_torus();
  auto const& f = g.base().alphabet();
  std::mt19937_64 rng(21);
  for (auto const& l : f.letters()) {
    Word gen = Word::reduce({l});
    CHECK(g.apply(g.apply(gen, Direction::forward), Direction::backward) == gen);
  }
  for (int i = 0; i < 1000; ++i) {
    auto u = free_reduce(f, test::random_raw(rng, f.letters(), 12));
    auto v = free_reduce(f, test::random_raw(rng, f.letters(), 12));
    REQUIRE(g.apply(g.apply(u, Direction::forward), Direction::backward) == u);
    REQUIRE(g.apply(word_mul(u, v), Direction::forward) ==
            word_mul(g.apply(u, Direction::forward), g.apply(v, Direction::forward)));
    std::int64_t n = static_cast<std::int64_t>(rng() % 13) - 6;
    REQUIRE(g.power_apply(-n, g.power_apply(n, u)) == u);
  }
}

TEST_CASE("torus normal form examples") {
  auto g = default_free_torus();
  CHECK(g.parse("t a T") == el(g, "b", 0));
  CHECK(g.parse("a t") == el(g, "a", 1));
  CHECK(g.parse("t t") == el(g, "", 2));
  CHECK(g.parse("") == el(g, "", 0));
  CHECK(g.format(g.parse("T a t")) == "c A");
  CHECK_THROWS_AS(g.parse("t x"), AlphabetError);
}

TEST_CASE("torus multiplication and inversion examples") {
  auto g = default_free_torus();
  CHECK(g.multiply(el(g, "a", 1), el(g, "", -1)) == el(g, "a", 0));
  CHECK(g.multiply(el(g, "", 1), el(g, "a", 0)) == el(g, "b", 1));
  CHECK(g.inverse(el(g, "a", 1)) == el(g, "a C", -1));
  CHECK(base_membership(el(g, "a b", 0)));
  CHECK_FALSE(base_membership(el(g, "", 1)));
  CHECK(base_membership(g.parse("t a T")));
}

TEST_CASE("normal forms are consistent with concatenation") {
  auto g = default_free_torus();
  auto letters = g.alphabet().letters();
  std::mt19937_64 rng(22);
  for (int i = 0; i < 10000; ++i) {
    auto w1 = test::random_raw(rng, letters, 12);
    auto w2 = test::random_raw(rng, letters, 12);
    auto g1 = g.normalize(w1);
    auto g2 = g.normalize(w2);
    REQUIRE(g.multiply(g1, g2) == g.normalize(test::concat(w1, w2)));
    REQUIRE(g.is_identity(g.multiply(g1, g.inverse(g1))));
    REQUIRE(g.inverse(g1) == g.normalize(test::invert_raw(w1)));
    // spelling round trip
    REQUIRE(g.normalize(g.spell(g1)) == g1);
  }
}

TEST_CASE("conjugation by powers of t applies the automorphism") {
  auto g = default_free_torus();
  auto const& f = g.base().alphabet();
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    auto fw = free_reduce(f, test::random_raw(rng, f.letters(), 8));
    std::int64_t n = static_cast<std::int64_t>(rng() % 17) - 8;
    std::vector<Letter> raw;
    Letter t = g.t_letter(n < 0);
    for (std::int64_t j = 0; j < std::abs(n); ++j) {
      raw.push_back(t);
    }
    raw.insert(raw.end(), fw.begin(), fw.end());
    for (std::int64_t j = 0; j < std::abs(n); ++j) {
      raw.push_back(inverse_letter(t));
    }
    REQUIRE(g.normalize(raw) == TorusElement{g.power_apply(n, fw), 0});
  }
}

TEST_CASE("growth of the default automorphism") {
  auto g = default_free_torus();
  auto const& f = g.base().alphabet();
  auto p10 = growth_profile(g, parse_word(f, "a"), 10);
  std::vector<std::size_t> expected = {1, 1, 1, 2, 2, 3, 4, 5, 7, 9, 12};
  CHECK(p10.lengths == expected);
  CHECK(p10.lengths == recurrence_lengths(10));

  auto p30 = growth_profile(g, parse_word(f, "a"), 30);
  CHECK(p30.lengths == recurrence_lengths(30));
  CHECK(p30.lengths[30] == 3329);
  std::string s = "a";
  for (int n = 0; n < 30; ++n) {
    s = substitute_text(s);
  }
  CHECK(s.size() == 3329);
  CHECK(f.format(g.power_apply(30, parse_word(f, "a")).letters(), "") == s);
  REQUIRE(p30.estimated_rate);
  // real root of l^3 = l + 1
  CHECK(*p30.estimated_rate == Catch::Approx(1.324718).epsilon(1e-3));

  auto p0 = growth_profile(g, parse_word(f, "b"), 0);
  CHECK(p0.lengths == std::vector<std::size_t>{1});
  CHECK_FALSE(p0.estimated_rate);
  CHECK_THROWS_AS(growth_profile(g, Word{}, 3), DegenerateInputError);
}

TEST_CASE("identity automorphism has a constant profile") {
  Alphabet f({"a", "b", "c"});
  TorusGroup g(BaseGroup::free(f), Automorphism::identity(3));
  g.validate();
  auto p = growth_profile(g, parse_word(f, "a B c"), 12);
  CHECK(p.lengths == std::vector<std::size_t>(13, 3));
  CHECK(*p.estimated_rate == 1.0);
  CHECK(g.parse("t a T") == TorusElement{parse_word(f, "a"), 0});
}

TEST_CASE("automorphism validation") {
  default_free_torus().validate();
  default_surface_torus(8).validate();
  Alphabet f({"a", "b", "c"});
  auto bad = Automorphism::parse(f, {"b", "c", "ab"}, {"a", "b", "c"});
  TorusGroup g(BaseGroup::free(f), bad);
  CHECK_THROWS_AS(g.validate(), HypothesisError);
  try {
    g.validate();
  } catch (HypothesisError const& e) {
    CHECK(e.reason() == "invalid-automorphism");
  }
  // invertible on generators but not preserving the surface relator
  auto p = surface_presentation(2);
  auto swap = Automorphism::parse(p.alphabet(), {"b", "a", "c", "d"}, {"b", "a", "c", "d"});
  TorusGroup s(BaseGroup::surface(p, 8), swap);
  CHECK_THROWS_AS(s.validate(), HypothesisError);
  CHECK_THROWS_AS(TorusGroup(BaseGroup::free(Alphabet({"a", "b"})), Automorphism::identity(3)),
                  DegenerateInputError);
}

TEST_CASE("surface torus normal forms") {
  auto g = default_surface_torus(8);
  auto const& f = g.base().alphabet();
  auto letters = g.alphabet().letters();
  std::mt19937_64 rng(24);
  for (int i = 0; i < 2000; ++i) {
    auto w1 = test::random_raw(rng, letters, 8);
    auto w2 = test::random_raw(rng, letters, 8);
    auto g1 = g.normalize(w1);
    auto g2 = g.normalize(w2);
    REQUIRE(g.equal(g.multiply(g1, g2), g.normalize(test::concat(w1, w2))));
    REQUIRE(g.is_identity(g.multiply(g1, g.inverse(g1))));
  }
  // the relator is trivial, conjugated or not
  CHECK(g.is_identity(g.parse("t a b A B c d C D T")));
  CHECK(g.equal(g.parse("t a T"), TorusElement{parse_word(f, "a b A"), 0}));
}
