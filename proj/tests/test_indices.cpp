#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "helpers.hpp"

using namespace balsam;

TEST_CASE("every unit joins the cell of its nearest sampled unit") {
  Population two = th::line_pop({0, 1}, {0.5, 0.5});
  CHECK(voronoi_cells(two.coords, {0}) == std::vector<int>{0, 0});

  Population corners = th::xy_pop({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, std::vector<double>(4, 0.5));
  // Units 1 and 2 are equidistant from both sampled corners; ties go to the
  // lower sampled id.
  CHECK(voronoi_cells(corners.coords, {0, 3}) == std::vector<int>{0, 0, 0, 3});

  std::vector<int> all = {0, 1, 2, 3};
  CHECK(voronoi_cells(corners.coords, all) == all);
}

TEST_CASE("cell-balance index is zero exactly when cells carry one unit of mass") {
  Population two = th::line_pop({0, 1}, {0.5, 0.5});
  CHECK(voronoi_index(two, {0}) == 0.0);

  Population four = th::line_pop({0, 1, 2, 3}, std::vector<double>(4, 0.5));
  CHECK(voronoi_index(four, {0, 2}) == 0.0);
  CHECK(std::abs(voronoi_index(four, {0, 1}) - 0.25) <= 1e-12);

  CHECK(th::error_code_of([&] { voronoi_index(four, {0}); }) == Errc::CardinalityMismatch);
}

TEST_CASE("a lattice sample balances cells better than random picks") {
  PopulationSpec spec;
  spec.N = 100;
  spec.n = 16;
  Population p = gen_population(spec);

  // The 16 units at the centers of a 4x4 blocking of the grid.
  std::vector<int> lattice;
  for (int bx = 0; bx < 4; ++bx)
    for (int by = 0; by < 4; ++by) {
      double cx = bx * 0.25 + 0.125, cy = by * 0.25 + 0.125;
      int best = -1;
      double bd = 1e9;
      for (int u = 0; u < 100; ++u) {
        double dx = p.coords.at(u, 0) - cx, dy = p.coords.at(u, 1) - cy;
        double d = dx * dx + dy * dy;
        if (d < bd) {
          bd = d;
          best = u;
        }
      }
      lattice.push_back(best);
    }
  std::sort(lattice.begin(), lattice.end());
  lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());
  REQUIRE(lattice.size() == 16);
  const double vi_lattice = voronoi_index(p, lattice);

  Rng rng(8);
  double vi_srs = 0.0;
  const int R = 1000;
  for (int r = 0; r < R; ++r) vi_srs += voronoi_index(p, srs_sample(100, 16, rng).units) / R;
  CHECK(vi_lattice < vi_srs);
}

TEST_CASE("regression-balance index vanishes on balanced cells with the probability column") {
  // Cells {0,1} and {2,3} each carry mass 1 and one sampled unit, so the
  // residual pi/pi - mass is zero in every cell.
  Population four = th::line_pop({0, 1, 2, 3}, std::vector<double>(4, 0.5));
  std::vector<std::vector<double>> cols = {four.pi};
  CHECK(balanced_voronoi_index(four, {0, 2}, cols, QSpec{QSpec::Gram}) == 0.0);
  CHECK(balanced_voronoi_index(four, {0, 2}, cols, QSpec{QSpec::Identity}) == 0.0);

  Population two = th::line_pop({0, 1}, {0.5, 0.5});
  std::vector<std::vector<double>> cols2 = {two.pi};
  CHECK(balanced_voronoi_index(two, {0}, cols2, QSpec{QSpec::Identity}) == 0.0);
  std::vector<std::vector<double>> x10 = {{1.0, 0.0}};
  CHECK(std::abs(balanced_voronoi_index(two, {0}, x10, QSpec{QSpec::Identity}) - 1.0) <= 1e-12);
  // x = (1, 0): the single cell holds 1/0.5 - (1 + 0) = 1, so the index is 1.

  std::vector<std::vector<double>> dup = {{1.0, 1.0}, {1.0, 1.0}};
  CHECK(th::error_code_of([&] {
          balanced_voronoi_index(two, {0}, dup, QSpec{QSpec::Gram});
        }) == Errc::SingularQ);
}

TEST_CASE("neighbor weights are inverse distances over a symmetrized k-nearest graph") {
  Population pair = th::line_pop({0, 2}, {1.0, 1.0});
  SpatialWeights W = build_weights(pair.coords, 1);
  REQUIRE(W.nbr[0].size() == 1);
  CHECK(W.nbr[0][0].first == 1);
  CHECK(W.nbr[0][0].second == 0.5);
  CHECK(W.total == 1.0);

  Population corners = th::xy_pop({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, std::vector<double>(4, 0.5));
  SpatialWeights Wc = build_weights(corners.coords, 1);
  auto has_edge = [&](int a, int b) {
    for (const auto& [j, w] : Wc.nbr[a])
      if (j == b) return true;
    return false;
  };
  CHECK(has_edge(0, 1));
  CHECK(has_edge(1, 0));
  CHECK(has_edge(0, 2));
  CHECK(has_edge(2, 0));
  CHECK(has_edge(1, 3));
  CHECK(has_edge(3, 1));
  CHECK_FALSE(has_edge(0, 3));
  CHECK(std::abs(Wc.total - 6.0) <= 1e-12);

  SpatialWeights Wd = build_weights(corners.coords, 10);  // clamps to N - 1
  for (int i = 0; i < 4; ++i) CHECK(Wd.nbr[i].size() == 3);

  Population dup = th::line_pop({1, 1}, {1.0, 1.0});
  CHECK(th::error_code_of([&] { build_weights(dup.coords, 1); }) == Errc::CoincidentNeighbors);
}

TEST_CASE("autocorrelation index hits its extremes on alternating line samples") {
  Population three = th::line_pop({1, 2, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  SpatialWeights W3 = build_weights(three.coords, 1);
  CHECK(std::abs(moran_index(W3, {1}) - (-1.0)) <= 1e-12);

  std::vector<double> xs(9), pis(9, 5.0 / 9.0);
  std::iota(xs.begin(), xs.end(), 0.0);
  Population nine = th::line_pop(xs, pis);
  SpatialWeights W9 = build_weights(nine.coords, 1);
  CHECK(std::abs(moran_index(W9, {0, 2, 4, 6, 8}) - (-1.0)) <= 1e-12);

  CHECK(th::error_code_of([&] { moran_index(W9, {}); }) == Errc::DegenerateSample);
  std::vector<int> all(9);
  std::iota(all.begin(), all.end(), 0);
  CHECK(th::error_code_of([&] { moran_index(W9, all); }) == Errc::DegenerateSample);
}

TEST_CASE("indices ignore rigid translations and uniform rescaling") {
  Population a = th::nine_unit_pop();
  Population b = a;
  for (int i = 0; i < 9; ++i) {
    b.coords.at(i, 0) = a.coords.at(i, 0) + 32.0;
    b.coords.at(i, 1) = a.coords.at(i, 1) - 16.0;
  }
  Population c = a;
  for (int i = 0; i < 9; ++i) {
    c.coords.at(i, 0) = a.coords.at(i, 0) * 2.0;
    c.coords.at(i, 1) = a.coords.at(i, 1) * 2.0;
  }
  const std::vector<int> s = {0, 3, 4, 6};
  SpatialWeights Wa = build_weights(a.coords, 2), Wb = build_weights(b.coords, 2),
                 Wc = build_weights(c.coords, 2);
  CHECK(std::abs(moran_index(Wa, s) - moran_index(Wb, s)) <= 1e-12);
  CHECK(std::abs(moran_index(Wa, s) - moran_index(Wc, s)) <= 1e-12);
  CHECK(std::abs(voronoi_index(a, s) - voronoi_index(b, s)) <= 1e-12);
  CHECK(std::abs(voronoi_index(a, s) - voronoi_index(c, s)) <= 1e-12);
  const double bia = balanced_voronoi_index(a, s, default_balance_columns(a));
  const double bib = balanced_voronoi_index(b, s, default_balance_columns(b));
  CHECK(std::abs(bia - bib) <= 1e-9);
}

TEST_CASE("optimized indices agree with the quadratic-time reference code") {
  Population p = th::xy_pop({{0.12, 0.77},
                             {0.43, 0.19},
                             {0.91, 0.35},
                             {0.27, 0.52},
                             {0.68, 0.88},
                             {0.55, 0.04}},
                            {0.3, 0.3, 0.3, 0.4, 0.35, 0.35});
  SpatialWeights W = build_weights(p.coords, 2);
  auto cols = default_balance_columns(p);
  for (const auto& s : th::all_subsets(6, 2)) {
    CHECK(voronoi_cells(p.coords, s) == th::bf_cells(p, s));
    CHECK(std::abs(moran_index(W, s) - th::bf_moran(p, s, 2)) <= 1e-12);
    CHECK(std::abs(voronoi_index(p, s) - th::bf_voronoi(p, s)) <= 1e-12);
    CHECK(std::abs(balanced_voronoi_index(p, s, cols, QSpec{QSpec::Gram}) -
                   th::bf_bvi(p, s, cols, true)) <= 1e-12);
    CHECK(std::abs(balanced_voronoi_index(p, s, cols, QSpec{QSpec::Identity}) -
                   th::bf_bvi(p, s, cols, false)) <= 1e-12);
  }
}
