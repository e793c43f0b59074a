#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "helpers.hpp"

using namespace balsam;

namespace {

std::vector<int> identity_order(int N) {
  std::vector<int> o(N);
  std::iota(o.begin(), o.end(), 0);
  return o;
}

}  // namespace

TEST_CASE("point estimate expands sampled values by inverse probability") {
  Population p = th::line_pop({0, 1, 2, 3}, {0.5, 0.5, 0.5, 0.5});
  Sample s;
  s.units = {0, 2};
  std::vector<double> ones(4, 1.0);
  CHECK(nht_estimate(p, s, ones) == 4.0);

  Population q = th::nine_unit_pop();
  Sample t;
  t.units = {1, 3, 5, 8};
  CHECK(nht_estimate(q, t, q.pi) == 4.0);

  Sample ref;
  ref.units = {0, 3, 4, 6};
  std::vector<double> y(9);
  std::iota(y.begin(), y.end(), 1.0);
  CHECK(std::abs(nht_estimate(q, ref, y) - 38.65079365079365) <= 1e-12);

  std::vector<int> domain = {0, 3};
  CHECK(std::abs(nht_estimate(q, ref, y, &domain) - (1.0 / 0.7 + 5.0)) <= 1e-12);
}

TEST_CASE("point estimate refuses a sampled unit with zero probability") {
  Population p = th::line_pop({0, 1, 2}, {1.0, 0.0, 1.0});
  Sample s;
  s.units = {0, 1};
  std::vector<double> y = {1, 1, 1};
  CHECK(th::error_code_of([&] { nht_estimate(p, s, y); }) == Errc::ZeroProbabilityMember);
}

TEST_CASE("design variance vanishes for a census") {
  Population p = th::line_pop({0, 1, 2}, {1.0, 1.0, 1.0});
  JointInclusionMatrix jm;
  jm.n = 3;
  jm.p.assign(9, 1.0);
  std::vector<double> y = {4, 9, 2};
  CHECK(ht_variance(p, jm, y) == 0.0);
}

TEST_CASE("design variance matches the closed form for equal-probability designs") {
  // N = 5, n = 2 without replacement: N^2 (1 - n/N) S^2 / n.
  std::vector<double> y = {1, 3, 7, 2, 5};
  Population p = th::line_pop({0, 1, 2, 3, 4}, std::vector<double>(5, 0.4));
  const double var = ht_variance(p, th::srs_joint(5, 2), y);
  CHECK(std::abs(var - 43.5) <= 1e-10);
}

TEST_CASE("design variance is zero when the study variable tracks the probabilities") {
  Population p = th::nine_unit_pop();
  BarLayout lay = build_bars(p, identity_order(9));
  JointInclusionMatrix jm = joint_inclusion(p, lay);
  CHECK(std::abs(ht_variance(p, jm, p.pi)) <= 1e-10);
}

TEST_CASE("variance estimators are design unbiased on a fully enumerated design") {
  std::vector<double> y = {2, 5, 1, 4};
  Population p = th::line_pop({0, 1, 2, 3}, std::vector<double>(4, 0.5));
  JointInclusionMatrix jm = th::srs_joint(4, 2);
  const double truth = ht_variance(p, jm, y);

  double mean_general = 0.0, mean_fixed = 0.0;
  const auto subsets = th::all_subsets(4, 2);
  for (const auto& u : subsets) {
    Sample s;
    s.units = u;
    mean_general += ht_variance_estimate(s, p, jm, y, VarianceMode::General);
    mean_fixed += ht_variance_estimate(s, p, jm, y, VarianceMode::FixedSize);
  }
  mean_general /= static_cast<double>(subsets.size());
  mean_fixed /= static_cast<double>(subsets.size());
  CHECK(std::abs(mean_general - truth) <= 1e-12);
  CHECK(std::abs(mean_fixed - truth) <= 1e-12);
}

TEST_CASE("fixed-size variance estimate is exactly zero for proportional outcomes") {
  Population p = th::nine_unit_pop();
  BarLayout lay = build_bars(p, identity_order(9));
  JointInclusionMatrix jm = joint_inclusion(p, lay);
  std::vector<double> y(9);
  for (int i = 0; i < 9; ++i) y[i] = 2.0 * p.pi[i];  // power of two keeps y/pi exact
  Sample s = draw_sample(lay, 0.5);
  CHECK(ht_variance_estimate(s, p, jm, y, VarianceMode::FixedSize) == 0.0);
}

TEST_CASE("census samples give exactly zero estimated variance in both modes") {
  Population p = th::line_pop({0, 1, 2}, {1.0, 1.0, 1.0});
  JointInclusionMatrix jm;
  jm.n = 3;
  jm.p.assign(9, 1.0);
  Sample s;
  s.units = {0, 1, 2};
  std::vector<double> y = {4, 9, 2};
  CHECK(ht_variance_estimate(s, p, jm, y, VarianceMode::General) == 0.0);
  CHECK(ht_variance_estimate(s, p, jm, y, VarianceMode::FixedSize) == 0.0);
}

TEST_CASE("a sampled pair that can never co-occur is reported as non-measurable") {
  Population p = th::nine_unit_pop();
  BarLayout lay = build_bars(p, identity_order(9));
  JointInclusionMatrix jm = joint_inclusion(p, lay);
  Sample s;
  s.units = {0, 1};  // both live in the first stack
  std::vector<double> y(9, 1.0);
  CHECK(th::error_code_of([&] {
          ht_variance_estimate(s, p, jm, y, VarianceMode::General);
        }) == Errc::ZeroJointProbability);
}

TEST_CASE("the estimator is unbiased over the full systematic support") {
  Population p = th::nine_unit_pop();
  BarLayout lay = build_bars(p, identity_order(9));
  std::vector<double> y(9);
  std::iota(y.begin(), y.end(), 1.0);
  double expected = 0.0;
  for (const auto& si : enumerate_support(lay)) {
    Sample s;
    s.units = si.units;
    expected += si.length * nht_estimate(p, s, y);
  }
  CHECK(std::abs(expected - 45.0) <= 1e-9);
}
