#include <gtest/gtest.h>

#include <cmath>

#include "elasteig/adaptive.hpp"
#include "elasteig/error.hpp"

using namespace elasteig;

namespace {

ErrorIndicators indicators(const std::vector<double>& eta_t) {
  ErrorIndicators ind;
  for (double e : eta_t) {
    ind.eta_K_sq.push_back(0.5 * e * e);
    ind.eta_J_sq.push_back(0.25 * e * e);
    ind.theta_sq.push_back(0.25 * e * e);
  }
  return ind;
}

MaterialModel square_model(double nu) {
  MaterialModel m;
  m.young[1] = 1.44e11;
  m.density = 7.7e3;
  m.poisson = nu;
  return m;
}

} // namespace

TEST(Marking, MaximumStrategy) {
  const ErrorIndicators ind = indicators({1.0, 0.4, 0.5, 0.49, 0.0, 0.8});
  EXPECT_EQ(mark(ind, 0.5), (std::vector<int>{0, 2, 5}));
  EXPECT_EQ(mark(ind, 1.0), (std::vector<int>{0}));
  EXPECT_EQ(mark(ind, 0.01).size(), 5u);
  EXPECT_THROW(mark(ind, 0.0), InputError);
  EXPECT_THROW(mark(ind, 1.5), InputError);
}

TEST(Marking, TiesAreAllMarked) {
  EXPECT_EQ(mark(indicators({2.0, 2.0, 1.0}), 1.0), (std::vector<int>{0, 1}));
}

TEST(RateFit, RecoversPowerLaw) {
  const std::vector<double> x = {100, 400, 1600, 6400};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.75));
  const RateFit f = fit_power_law(x, y);
  EXPECT_NEAR(f.slope, -0.75, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
  EXPECT_EQ(f.points, 4);
}

TEST(RateFit, ExcludesNonPositive) {
  const RateFit f = fit_power_law({1, 2, 4, 8, 16}, {1, 0.25, 0.0625, 0.0, 1.0 / 256});
  EXPECT_EQ(f.points, 4);
  EXPECT_EQ(f.excluded, 1);
  EXPECT_NEAR(f.slope, -2.0, 1e-12);
  EXPECT_THROW(fit_power_law({1, 2, 3}, {1, 0, 1}), InputError);
  EXPECT_THROW(fit_power_law({1, 2}, {1, 2, 3}), InputError);
}

TEST(Extrapolation, RecoversLimitAndOrder) {
  const std::vector<double> h = {0.1, 0.07, 0.05, 0.035, 0.025};
  for (double t : {1.0, 1.4, 2.0, 3.2}) {
    std::vector<double> v;
    for (double x : h) v.push_back(5.0 + 2.0 * std::pow(x, t));
    const Extrapolation e = extrapolate(h, v);
    EXPECT_NEAR(e.value, 5.0, 1e-9) << t;
    EXPECT_NEAR(e.order, t, 1e-4) << t;
    EXPECT_TRUE(e.monotone);
  }
  EXPECT_THROW(extrapolate({0.1, 0.05}, {1.0, 1.1}), InputError);
}

TEST(Clustering, GroupsNearlyEqualValues) {
  const auto c = cluster_eigenvalues({1.0, 1.0 + 1e-9, 2.0, 3.0, 3.0 + 1e-3});
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c[0], (std::pair<int, int>{0, 2}));
  EXPECT_EQ(c[1], (std::pair<int, int>{2, 3}));
  EXPECT_EQ(c[3], (std::pair<int, int>{4, 5}));
}

TEST(StudyConfig, Validation) {
  StudyConfig c;
  c.initial_mesh = unit_square_mesh(2);
  c.model = square_model(0.35);
  EXPECT_NO_THROW(c.check());
  c.references = {{1, 1.0, ""}};
  EXPECT_THROW(c.check(), InputError);
  c.references = {{2, 1.0, "test"}};
  EXPECT_THROW(c.check(), InputError);
  c.references.clear();
  c.loop = LoopKind::Adaptive;
  c.meshes = {unit_square_mesh(2), unit_square_mesh(3)};
  EXPECT_THROW(c.check(), InputError);
  EXPECT_EQ(loop_kind_from_string("adaptive"), LoopKind::Adaptive);
  EXPECT_THROW(loop_kind_from_string("greedy"), InputError);
}

TEST(Study, UniformHistoryWithReference) {
  StudyConfig c;
  for (int n : {4, 6, 8, 10}) c.meshes.push_back(unit_square_mesh(n));
  c.model = square_model(0.35);
  c.modes = {1, 2};
  c.references = {{1, 2944.295 * 2944.295, "published value"}};
  int seen = 0;
  const ConvergenceHistory h = run_study(c, [&](const IterationRecord& r, const Mesh&) { EXPECT_EQ(r.iteration, seen++); });
  ASSERT_EQ(h.records.size(), 4u);
  EXPECT_TRUE(h.failure.empty());
  EXPECT_EQ(h.err_source, (std::vector<std::string>{"reference", "extrapolation"}));
  for (std::size_t i = 1; i < h.records.size(); ++i) {
    EXPECT_GT(h.records[i].dofs, h.records[i - 1].dofs);
    EXPECT_LT(h.records[i].err[0], h.records[i - 1].err[0]);
    EXPECT_LT(h.records[i].kappa_hat[0], h.records[i - 1].kappa_hat[0]);
    EXPECT_GT(h.records[i].eta, 0.0);
  }
  EXPECT_NEAR(h.records[0].err[0], std::abs(h.records[0].kappa_hat[0] - 2944.295 * 2944.295), 1e-6);
  EXPECT_NEAR(h.records[0].eff, h.records[0].err[0] / (h.records[0].eta * h.records[0].eta), 1e-12);
  EXPECT_GT(fit_rate(h, RateAxis::H, 1).slope, 1.0);
  EXPECT_LT(fit_rate(h, RateAxis::Dofs, 1).slope, -0.5);
}

TEST(Study, AdaptiveLoopRefinesAndStops) {
  StudyConfig c;
  c.initial_mesh = lshape_mesh(2);
  c.model.young = {{1, 2.0}, {2, 1.0}, {3, 2.0}};
  c.model.poisson = 0.35;
  c.family = ElementFamily::Mini;
  c.loop = LoopKind::Adaptive;
  c.max_iterations = 6;
  c.max_dofs = 4000;
  const ConvergenceHistory h = run_study(c);
  ASSERT_GE(h.records.size(), 3u);
  EXPECT_LE(h.records.back().dofs, 4000);
  for (std::size_t i = 0; i + 1 < h.records.size(); ++i) {
    EXPECT_GT(h.records[i].marked, 0);
    EXPECT_GT(h.records[i + 1].cells, h.records[i].cells);
  }
}

TEST(Study, SolverFailureKeepsPartialHistory) {
  StudyConfig c;
  c.meshes = {unit_square_mesh(2), unit_square_mesh(1)};
  c.model = square_model(0.5);
  c.family = ElementFamily::Mini;
  c.modes = {1};
  c.eigen.k = 6;
  c.estimate = false;
  const ConvergenceHistory h = run_study(c);
  EXPECT_EQ(h.records.size(), 1u);
  EXPECT_NE(h.failure.find("iteration 1"), std::string::npos) << h.failure;
}
