#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eigenweight/rearrange.hpp"

using namespace eigenweight;

namespace {

Weight random_weight(std::mt19937_64& rng, std::size_t n, double measure, double lo = -1.0,
                     double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Weight w{std::vector<double>(n), measure};
  for (auto& v : w.values) v = dist(rng);
  return w;
}

double pairing(const Weight& m, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t e = 0; e < q.size(); ++e) s += m.values[e] * q[e];
  return s;
}

}  // namespace

TEST_CASE("distribution function") {
  const Weight w{{1.0, 3.0, 2.0}, 1.0 / 3.0};
  CHECK(distribution_function(w, 1.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(distribution_function(w, -10.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(distribution_function(w, 3.0) == 0.0);  // superlevel sets are strict
  // right continuity and monotonicity on a sample of thresholds
  double prev = distribution_function(w, -5.0);
  for (double t = -5.0; t <= 4.0; t += 0.25) {
    const double d = distribution_function(w, t);
    CHECK(d <= prev);
    prev = d;
  }
}

TEST_CASE("decreasing rearrangement") {
  {
    const StepRearrangement r = decreasing_rearrangement({{1.0, 3.0, 2.0}, 1.0 / 3.0});
    REQUIRE(r.levels.size() == 3);
    CHECK(r.levels[0] == 3.0);
    CHECK(r.levels[1] == 2.0);
    CHECK(r.levels[2] == 1.0);
    CHECK(r.breakpoints[0] == doctest::Approx(1.0 / 3.0));
    CHECK(r.breakpoints[2] == doctest::Approx(1.0));
  }
  {
    const StepRearrangement r = decreasing_rearrangement({{0.5, 0.5, 0.5, 0.5}, 0.25});
    CHECK(r.levels.size() == 1);  // constant weight collapses to one level
    CHECK(r.levels[0] == 0.5);
    CHECK(r.breakpoints[0] == doctest::Approx(1.0));
  }
  {
    std::mt19937_64 rng(42);
    const Weight w = random_weight(rng, 17, 1.0 / 17.0);
    const StepRearrangement r = decreasing_rearrangement(w);
    CHECK(r.total_integral() == doctest::Approx(w.total_integral()).epsilon(1e-12));
    CHECK(r.levels.front() == doctest::Approx(w.max_value()));
    CHECK(r.levels.back() == doctest::Approx(w.min_value()));
    // the rearrangement preserves the distribution function
    for (double t = -1.5; t <= 2.5; t += 0.1) {
      double measure_above = 0.0;
      double prev = 0.0;
      for (std::size_t i = 0; i < r.levels.size(); ++i) {
        if (r.levels[i] > t) measure_above += r.breakpoints[i] - prev;
        prev = r.breakpoints[i];
      }
      CHECK(measure_above == doctest::Approx(distribution_function(w, t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("majorization") {
  const Weight f{{2.0, -1.0}, 0.5};
  SUBCASE("mean constant is majorized") {
    const Weight mean{{0.5, 0.5}, 0.5};
    CHECK(majorizes(f, mean));
    CHECK_FALSE(majorizes(mean, f));
  }
  SUBCASE("reflexivity") { CHECK(majorizes(f, f)); }
  SUBCASE("hand-evaluated counterexample") {
    const Weight g{{3.0, -2.0}, 0.5};
    CHECK_FALSE(majorizes(f, g));  // partial integral of g* exceeds f*
    CHECK(majorizes(g, f));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(majorizes(f, Weight{{1.0, 1.0, -1.5}, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(majorizes(f, Weight{{2.0, -1.0}, 0.25}), std::invalid_argument);
  }
}

TEST_CASE("class and closure membership") {
  const Weight m0{{1.0, -0.5, 0.25, -0.75}, 0.25};
  const RearrangementClass cls = RearrangementClass::from_weight(m0);

  Weight perm = m0;
  std::swap(perm.values[0], perm.values[3]);
  CHECK(class_contains(cls, perm));
  CHECK(closure_contains(cls, perm));

  const Weight mean = cls.mean_constant_weight();
  CHECK(closure_contains(cls, mean));
  CHECK_FALSE(class_contains(cls, mean));

  Weight bigger = m0;
  bigger.values[0] = 5.0;
  CHECK_FALSE(class_contains(cls, bigger));
  CHECK_FALSE(closure_contains(cls, bigger));
}

TEST_CASE("closure contains convex combinations of members") {
  std::mt19937_64 rng(9);
  const Weight m0 = random_weight(rng, 12, 1.0 / 12.0);
  const RearrangementClass cls = RearrangementClass::from_weight(m0);
  for (int trial = 0; trial < 20; ++trial) {
    Weight a = m0, b = m0, c = m0;
    std::shuffle(a.values.begin(), a.values.end(), rng);
    std::shuffle(b.values.begin(), b.values.end(), rng);
    std::shuffle(c.values.begin(), c.values.end(), rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double wa = unit(rng), wb = unit(rng), wc = unit(rng);
    const double sum = wa + wb + wc;
    wa /= sum; wb /= sum; wc /= sum;
    Weight combo{std::vector<double>(12), m0.element_measure};
    for (std::size_t e = 0; e < 12; ++e)
      combo.values[e] = wa * a.values[e] + wb * b.values[e] + wc * c.values[e];
    CHECK(closure_contains(cls, combo));
  }
}

TEST_CASE("equimeasurability of |f| under permutation") {
  std::mt19937_64 rng(13);
  const Weight w = random_weight(rng, 9, 1.0 / 9.0);
  Weight p = w;
  std::shuffle(p.values.begin(), p.values.end(), rng);
  Weight aw = w, ap = p;
  for (auto& v : aw.values) v = std::abs(v);
  for (auto& v : ap.values) v = std::abs(v);
  const StepRearrangement ra = decreasing_rearrangement(aw);
  const StepRearrangement rp = decreasing_rearrangement(ap);
  CHECK(ra.levels == rp.levels);
  CHECK(ra.breakpoints == rp.breakpoints);
}

TEST_CASE("Hardy-Littlewood pairings against the permutation oracle") {
  const RearrangementClass cls = RearrangementClass::from_weight({{0.0, 5.0, 10.0}, 1.0});
  const std::vector<double> q{3.0, 1.0, 2.0};

  const Weight wmax = hl_max_pairing(cls, q);
  CHECK(wmax.values == std::vector<double>{10.0, 0.0, 5.0});
  CHECK(pairing(wmax, q) == doctest::Approx(40.0));

  const Weight wmin = hl_min_pairing(cls, q);
  CHECK(wmin.values == std::vector<double>{0.0, 10.0, 5.0});
  CHECK(pairing(wmin, q) == doctest::Approx(20.0));

  // brute force over all six permutations
  std::vector<double> v{0.0, 5.0, 10.0};
  std::sort(v.begin(), v.end());
  double lo = 1e300, hi = -1e300;
  do {
    const double s = pairing({v, 1.0}, q);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  } while (std::next_permutation(v.begin(), v.end()));
  CHECK(hi == doctest::Approx(pairing(wmax, q)));
  CHECK(lo == doctest::Approx(pairing(wmin, q)));
}

TEST_CASE("pairing tie-breaks and degenerate q") {
  const RearrangementClass cls = RearrangementClass::from_weight({{1.0, 4.0, 2.0, 3.0}, 0.25});
  SUBCASE("constant q: descending by element index") {
    const std::vector<double> q(4, 1.0);
    CHECK(hl_max_pairing(cls, q).values == std::vector<double>{4.0, 3.0, 2.0, 1.0});
    CHECK(hl_min_pairing(cls, q).values == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  }
  SUBCASE("strictly decreasing q: max pairing is the sorted arrangement") {
    const std::vector<double> q{4.0, 3.0, 2.0, 1.0};
    CHECK(hl_max_pairing(cls, q).values == std::vector<double>{4.0, 3.0, 2.0, 1.0});
  }
  SUBCASE("negative q is a caller bug") {
    CHECK_THROWS_AS(hl_max_pairing(cls, std::vector<double>{1.0, -0.1, 0.0, 0.0}),
                    std::invalid_argument);
  }
  SUBCASE("outputs stay in the class") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> q(4);
    for (auto& x : q) x = unit(rng);
    CHECK(class_contains(cls, hl_max_pairing(cls, q)));
    CHECK(class_contains(cls, hl_min_pairing(cls, q)));
  }
}

TEST_CASE("truncation of the decreasing rearrangement") {
  SUBCASE("sign-changing generator: gamma from the cumulative-sum oracle") {
    // m0* = 2 on (0,1/2), -1 on [1/2,1): tail vanishes at gamma = 1/4
    const RearrangementClass cls =
        RearrangementClass::from_weight({{2.0, -1.0, 2.0, -1.0}, 0.25});
    const Truncation tr = truncation_rearrangement(cls);
    CHECK(tr.gamma == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(tr.rearrangement.levels.size() == 2);
    CHECK(tr.rearrangement.levels[0] == 2.0);
    CHECK(tr.rearrangement.levels[1] == 0.0);
    CHECK(tr.rearrangement.breakpoints[0] == doctest::Approx(0.25));
    CHECK(tr.rearrangement.breakpoints[1] == doctest::Approx(1.0));
  }
  SUBCASE("nonnegative generator: unchanged rearrangement") {
    const RearrangementClass cls = RearrangementClass::from_weight({{1.0, 0.0, 2.0, 0.5}, 0.25});
    const Truncation tr = truncation_rearrangement(cls);
    CHECK(tr.gamma == doctest::Approx(0.75));  // measure of {m0 > 0}
    const StepRearrangement direct = decreasing_rearrangement({{1.0, 0.0, 2.0, 0.5}, 0.25});
    CHECK(tr.rearrangement.levels == direct.levels);
    CHECK(tr.rearrangement.breakpoints == direct.breakpoints);
  }
  SUBCASE("nonpositive total integral is the unbounded-supremum regime") {
    const RearrangementClass cls = RearrangementClass::from_weight({{1.0, -2.0}, 0.5});
    CHECK_THROWS_AS(truncation_rearrangement(cls), std::domain_error);
  }
  SUBCASE("gamma interpolates inside a step") {
    // m0* = 3 on (0,1/3), 1 on (1/3,2/3), -0.9 on (2/3,1): total = 31/30
    const RearrangementClass cls =
        RearrangementClass::from_weight({{3.0, 1.0, -0.9}, 1.0 / 3.0});
    const Truncation tr = truncation_rearrangement(cls);
    const double total = cls.total_integral();
    // the cumulative integral reaches 1 after the first step, so the
    // crossing lies inside the unit-slope second step
    CHECK(tr.gamma == doctest::Approx(1.0 / 3.0 + (total - 1.0)).epsilon(1e-14));
    CHECK(tr.rearrangement.total_integral() == doctest::Approx(total).epsilon(1e-14));
  }
  SUBCASE("partial integrals of the truncation saturate at the total") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      Weight w = random_weight(rng, 15, 1.0 / 15.0, -1.0, 3.0);
      if (!(w.total_integral() > 0.0) || w.min_value() >= 0.0) continue;
      const RearrangementClass cls = RearrangementClass::from_weight(w);
      const Truncation tr = truncation_rearrangement(cls);
      const StepRearrangement m0s = decreasing_rearrangement(w);
      const double total = cls.total_integral();
      for (double t = 0.05; t <= 1.0; t += 0.05) {
        const double expected = std::min(m0s.partial_integral(t), total);
        CHECK(tr.rearrangement.partial_integral(t) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("checkerboard rearrangements") {
  const RearrangementClass two =
      RearrangementClass::from_weight({{1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0}, 0.125});
  SUBCASE("k = 1 sorts descending") {
    CHECK(checkerboard_rearrangement(two, 1).values ==
          std::vector<double>{1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0});
  }
  SUBCASE("k = 4 alternates at stripe width one") {
    CHECK(checkerboard_rearrangement(two, 4).values ==
          std::vector<double>{1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0});
  }
  SUBCASE("any compatible k is a class member") {
    std::mt19937_64 rng(17);
    const Weight m0 = random_weight(rng, 12, 1.0 / 12.0);
    const RearrangementClass cls = RearrangementClass::from_weight(m0);
    for (int k = 1; k <= 6; ++k) CHECK(class_contains(cls, checkerboard_rearrangement(cls, k)));
  }
  SUBCASE("incompatible stripe counts") {
    CHECK_THROWS_AS(checkerboard_rearrangement(two, 5), std::invalid_argument);
    CHECK_THROWS_AS(checkerboard_rearrangement(two, 0), std::invalid_argument);
  }
}
