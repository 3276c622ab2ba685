#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace relaxmitl;
using product::Rpa;
using testing_support::make_rpa;
using testing_support::running_example;

namespace {

// 4x1 corridor: start, then three grass cells.
Rpa corridor() {
  auto t = running_example();
  return make_rpa(t, 4, 1, {0, 2, 2, 2});
}

}  // namespace

TEST(Product, SizeIsCellsTimesTbaStates) {
  auto t = running_example();
  for (int n : {1, 3, 10}) {
    Rpa r = make_rpa(t, n, n, std::vector<wts::AtomSet>(static_cast<std::size_t>(n * n), 0));
    EXPECT_EQ(r.size(), static_cast<std::size_t>(n * n) * 7u);
    EXPECT_EQ(r.stats().states, r.size());
    EXPECT_EQ(r.stats().accepting, static_cast<std::size_t>(n * n));
  }
  auto cs = testing_support::build(testing_support::kCaseStudy, mitl::collect_atoms(testing_support::kCaseStudy));
  for (int n : {10, 30, 50}) {
    Rpa r = make_rpa(cs, n, n, std::vector<wts::AtomSet>(static_cast<std::size_t>(n * n), 0));
    EXPECT_EQ(r.size(), static_cast<std::size_t>(n * n) * cs.state_count());
  }
}

TEST(Product, DegenerateGrid) {
  auto t = testing_support::build("hard: G !obs ; soft: ", {"obs"});
  Rpa r = make_rpa(t, 1, 1, {0});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(r.stats().transitions, 0u);
}

TEST(Product, ConstructionErrors) {
  auto t = running_example();
  EXPECT_THROW(Rpa(wts::Wts::from_grid(2, 1, {"obs", "p", "g"}, {0, 0}, {0, 0}), t), std::invalid_argument);
  EXPECT_THROW(make_rpa(t, 2, 1, {1, 0}), std::invalid_argument);
}

TEST(Product, TransitionsFollowTheDefinition) {
  std::mt19937_64 rng(17);
  auto t = running_example();
  for (int iter = 0; iter < 20; ++iter) {
    Rpa r = make_rpa(t, 3, 3, testing_support::random_labels(rng, 3, 3, 0.15));
    for (product::StateId a = 0; a < r.size(); ++a)
      for (product::StateId b = 0; b < r.size(); ++b) {
        const auto qa = r.cell_of(a), qb = r.cell_of(b);
        bool expected = false;
        if (r.wts().adjacent(qa, qb)) {
          const wts::AtomSet soft = r.wts().label(qb) & ~t.hard_atoms;
          for (const auto& e : t.edges)
            expected |= e.from == r.tba_of(a) && e.to == r.tba_of(b) && e.symbols.matches(soft);
        }
        ASSERT_EQ(r.has_transition(a, b), expected) << a << "->" << b;
      }
    for (product::StateId a = 0; a < r.size(); ++a)
      for (product::StateId b : r.successors(a)) {
        const auto& preds = r.predecessors(b);
        ASSERT_NE(std::find(preds.begin(), preds.end(), a), preds.end());
      }
  }
}

TEST(Product, OnlyHardAtomsMayChange) {
  auto t = running_example();
  Rpa r = make_rpa(t, 3, 1, {0, 0, 2});
  const auto before = r.stats().transitions;
  EXPECT_THROW(r.set_label(2, 0), std::invalid_argument);
  const auto v = r.version();
  r.set_label(1, 1);
  EXPECT_EQ(r.version(), v + 1);
  EXPECT_TRUE(r.blocked_cell(1));
  EXPECT_EQ(r.stats().transitions, before);
  r.set_label(1, 1);
  EXPECT_EQ(r.version(), v + 1);
  r.set_label(1, 0);
  EXPECT_FALSE(r.blocked_cell(1));
}

TEST(ViolationWeight, Examples) {
  Rpa r = corridor();
  EXPECT_EQ(r.violation_weight(r.id(0, 0), r.id(1, 1), 0.8), Cost(0.8));
  EXPECT_EQ(r.violation_weight(r.id(0, 0), r.id(1, 0), 0.8), Cost(0.0));
  EXPECT_EQ(r.violation_weight(r.id(0, 0), r.id(1, 0), 0.3), Cost(0.0));
  EXPECT_NEAR(r.violation_weight(r.id(0, 0), r.id(1, 2), 0.8).value(), 1.0, 1e-12);
  EXPECT_TRUE(r.violation_weight(r.id(0, 0), r.id(1, 6), 0.8).is_infinite());
  r.set_label(1, 2 | 1);
  EXPECT_THROW(r.set_label(1, 1), std::invalid_argument);
  EXPECT_TRUE(r.violation_weight(r.id(0, 0), r.id(1, 1), 0.8).is_infinite());
}

TEST(PathWeight, Examples) {
  Rpa r = corridor();
  const std::vector<product::StateId> grass{r.id(0, 0), r.id(1, 1), r.id(2, 1), r.id(3, 1)};
  for (std::size_t i = 0; i + 1 < grass.size(); ++i) ASSERT_TRUE(r.has_transition(grass[i], grass[i + 1]));
  EXPECT_NEAR(product::path_weight(r, grass, 0.8).value(), 2.4, 1e-12);
  EXPECT_EQ(product::path_weight(r, {r.id(0, 0), r.id(1, 0), r.id(2, 0)}, 0.8), Cost(0.0));
  EXPECT_TRUE(product::path_weight(r, {r.id(0, 0), r.id(1, 6)}, 0.8).is_infinite());
}

TEST(RunViolationCosts, Examples) {
  Rpa r = corridor();
  EXPECT_EQ(product::run_violation_costs(r, {r.id(0, 0), r.id(1, 0), r.id(2, 0)}),
            std::make_pair(Cost(0), Cost(0)));
  EXPECT_EQ(product::run_violation_costs(r, {r.id(0, 3), r.id(1, 3), r.id(2, 3)}),
            std::make_pair(Cost(2), Cost(0)));
  EXPECT_EQ(product::run_violation_costs(r, {r.id(0, 0), r.id(1, 1)}), std::make_pair(Cost(0), Cost(1)));
}

// Random product walks: weight zero iff every target is violation-free; at
// the alpha endpoints only one violation kind counts.
TEST(PathWeightProperty, ZeroIffViolationFreeAndAlphaEndpoints) {
  std::mt19937_64 rng(23);
  auto t = running_example();
  int zero = 0, positive = 0;
  for (int iter = 0; iter < 300; ++iter) {
    Rpa r = make_rpa(t, 4, 4, testing_support::random_labels(rng, 4, 4, 0.0));
    std::vector<product::StateId> path{r.id(0, std::uniform_int_distribution<std::size_t>(0, 5)(rng))};
    std::uniform_int_distribution<int> len(1, 8);
    for (int i = len(rng); i > 0; --i) {
      std::vector<product::StateId> options;
      for (auto s : r.successors(path.back()))
        if (!r.sink(s)) options.push_back(s);
      if (options.empty()) break;
      path.push_back(options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)]);
    }
    bool clean = true;
    double vc = 0, vd = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
      const auto v = t.violation(r.tba_of(path[i]));
      clean &= v.continuous.is_zero() && v.discrete.is_zero();
      vc += v.continuous.value();
      vd += v.discrete.value();
    }
    const Cost w = product::path_weight(r, path, 0.8);
    ASSERT_EQ(w.is_zero(), clean);
    (clean ? zero : positive)++;
    ASSERT_DOUBLE_EQ(product::path_weight(r, path, 1.0).value(), vd);
    ASSERT_DOUBLE_EQ(product::path_weight(r, path, 0.0).value(), vc);
    const auto [c, d] = product::run_violation_costs(r, path);
    ASSERT_DOUBLE_EQ(c.value(), vc);
    ASSERT_DOUBLE_EQ(d.value(), vd);
  }
  EXPECT_GT(zero, 10);
  EXPECT_GT(positive, 10);
}
