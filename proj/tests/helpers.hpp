#pragma once

// Shared fixtures and independently coded reference implementations for the
// index tests.  The reference code below deliberately avoids calling into the
// library: plain O(N^2) loops and a small Gauss-Jordan solve, so that the
// optimized implementations have something honest to be compared against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "balsam/balsam.hpp"

namespace th {

using balsam::Coords;
using balsam::Population;

inline Population nine_unit_pop() {
  // 3x3 unit grid, column-major ids, mixed probabilities summing to 4.
  Population p;
  p.coords = Coords(2, 9);
  for (int i = 0; i < 9; ++i) {
    p.coords.at(i, 0) = static_cast<double>(i / 3 + 1);
    p.coords.at(i, 1) = static_cast<double>(i % 3 + 1);
  }
  p.pi = {0.7, 0.3, 0.4, 0.8, 0.3, 0.65, 0.45, 0.2, 0.2};
  return p;
}

inline Population line_pop(const std::vector<double>& xs, const std::vector<double>& pis) {
  Population p;
  p.coords = Coords(2, static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    p.coords.at(static_cast<int>(i), 0) = xs[i];
    p.coords.at(static_cast<int>(i), 1) = 0.0;
  }
  p.pi = pis;
  return p;
}

inline Population xy_pop(const std::vector<std::pair<double, double>>& pts,
                         const std::vector<double>& pis) {
  Population p;
  p.coords = Coords(2, static_cast<int>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    p.coords.at(static_cast<int>(i), 0) = pts[i].first;
    p.coords.at(static_cast<int>(i), 1) = pts[i].second;
  }
  p.pi = pis;
  return p;
}

inline std::vector<std::vector<int>> all_subsets(int N, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == n) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < N; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

inline balsam::JointInclusionMatrix srs_joint(int N, int n) {
  balsam::JointInclusionMatrix jm;
  jm.n = N;
  jm.p.assign(static_cast<std::size_t>(N) * N, 0.0);
  const double d = static_cast<double>(n) / N;
  const double off = static_cast<double>(n) * (n - 1) / (static_cast<double>(N) * (N - 1));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) jm.at(i, j) = (i == j) ? d : off;
  return jm;
}

inline double dist(const Population& p, int a, int b) {
  double s = 0.0;
  for (int d = 0; d < p.dim(); ++d) {
    const double e = p.coords.at(a, d) - p.coords.at(b, d);
    s += e * e;
  }
  return std::sqrt(s);
}

// Nearest sampled unit per population unit, ties to the lowest sampled id.
inline std::vector<int> bf_cells(const Population& p, const std::vector<int>& sample) {
  const int N = static_cast<int>(p.size());
  std::vector<int> owner(N, -1);
  for (int i = 0; i < N; ++i) {
    double best = 0.0;
    for (int s : sample) {
      const double d = dist(p, i, s);
      if (owner[i] < 0 || d < best) {
        owner[i] = s;
        best = d;
      }
    }
  }
  return owner;
}

inline double bf_voronoi(const Population& p, const std::vector<int>& sample) {
  const std::vector<int> owner = bf_cells(p, sample);
  const double n = static_cast<double>(sample.size());
  double total = 0.0;
  for (int s : sample) {
    double g = 0.0, ghat = 0.0;
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
      if (owner[i] != s) continue;
      g += p.pi[i] / n;
      if (std::binary_search(sample.begin(), sample.end(), i)) ghat += 1.0 / n;
    }
    total += (ghat - g) * (ghat - g);
  }
  return n * total;
}

// k nearest neighbours by full sort, symmetrized union, weights 1/distance.
inline double bf_moran(const Population& p, const std::vector<int>& sample, int k) {
  const int N = static_cast<int>(p.size());
  std::vector<std::vector<double>> w(N, std::vector<double>(N, 0.0));
  for (int i = 0; i < N; ++i) {
    std::vector<std::pair<double, int>> cand;
    for (int j = 0; j < N; ++j)
      if (j != i) cand.emplace_back(dist(p, i, j), j);
    std::sort(cand.begin(), cand.end());
    for (int m = 0; m < k && m < static_cast<int>(cand.size()); ++m)
      w[i][cand[m].second] = 1.0 / cand[m].first;
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (w[i][j] == 0.0 && w[j][i] != 0.0) w[i][j] = w[j][i];
  std::vector<double> z(N, 0.0);
  const double share = static_cast<double>(sample.size()) / N;
  for (int i = 0; i < N; ++i) z[i] = -share;
  for (int s : sample) z[s] = 1.0 - share;
  double sw = 0.0, num = 0.0, zz = 0.0;
  for (int i = 0; i < N; ++i) {
    zz += z[i] * z[i];
    for (int j = 0; j < N; ++j) {
      sw += w[i][j];
      num += w[i][j] * z[i] * z[j];
    }
  }
  return static_cast<double>(N) * num / (sw * zz);
}

// Solve Q x = r by Gauss-Jordan with partial pivoting; returns r' Q^-1 r.
inline double bf_quad_form(std::vector<std::vector<double>> Q, std::vector<double> r) {
  const int p = static_cast<int>(r.size());
  std::vector<double> x = r;
  std::vector<std::vector<double>> A = Q;
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int i = c + 1; i < p; ++i)
      if (std::abs(A[i][c]) > std::abs(A[piv][c])) piv = i;
    std::swap(A[c], A[piv]);
    std::swap(x[c], x[piv]);
    for (int i = 0; i < p; ++i) {
      if (i == c) continue;
      const double f = A[i][c] / A[c][c];
      for (int j = c; j < p; ++j) A[i][j] -= f * A[c][j];
      x[i] -= f * x[c];
    }
  }
  double out = 0.0;
  for (int i = 0; i < p; ++i) out += r[i] * (x[i] / A[i][i]);
  return out;
}

inline double bf_bvi(const Population& p, const std::vector<int>& sample,
                     const std::vector<std::vector<double>>& xcols, bool gram) {
  const int np = static_cast<int>(xcols.size());
  const std::vector<int> owner = bf_cells(p, sample);
  std::vector<std::vector<double>> Q(np, std::vector<double>(np, 0.0));
  if (gram) {
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < np; ++b)
        for (int i = 0; i < p.size(); ++i) Q[a][b] += xcols[a][i] * xcols[b][i];
  } else {
    for (int a = 0; a < np; ++a) Q[a][a] = 1.0;
  }
  double total = 0.0;
  for (int s : sample) {
    std::vector<double> r(np, 0.0);
    for (int i = 0; i < p.size(); ++i) {
      if (owner[i] != s) continue;
      for (int a = 0; a < np; ++a) {
        if (std::binary_search(sample.begin(), sample.end(), static_cast<int>(i)))
          r[a] += xcols[a][i] / p.pi[i] - xcols[a][i];
        else
          r[a] -= xcols[a][i];
      }
    }
    total += bf_quad_form(Q, r);
  }
  return std::sqrt(total / static_cast<double>(sample.size()));
}

template <class F>
std::optional<balsam::Errc> error_code_of(F&& f) {
  try {
    std::forward<F>(f)();
    return std::nullopt;
  } catch (const balsam::Error& e) {
    return e.code;
  }
}

}  // namespace th
