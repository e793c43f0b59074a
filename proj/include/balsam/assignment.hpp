#pragma once

// Exact solvers for the two matching problems in the pipeline:
//  - hungarian: square min-cost assignment, O(n^3), used to pair sample
//    locations with cluster centroids;
//  - balanced_transport: min-cost assignment of P points to n sinks whose
//    sizes must differ by at most one, used by the constrained n-means step.
//    Successive shortest paths over a compressed graph whose nodes are the
//    sinks, a shared overflow pool, and the terminal; candidate point moves
//    between sinks are kept in lazy per-pair heaps, so one solve costs about
//    O(P * n^2) plus heap churn instead of a full bipartite Dijkstra per unit.

#include <cassert>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "balsam/common.hpp"

namespace balsam {

// Returns the column matched to each row. Deterministic.
inline std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  require(n > 0, Errc::BadInput, "empty assignment problem");
  for (const auto& row : cost)
    require(static_cast<int>(row.size()) == n, Errc::DimensionMismatch, "assignment cost must be square");

  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, INF);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = INF;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Among cost-equal optima, prefer the lexicographically smallest assignment
// (scan rows in order, lower column wins). Only exact pairwise-swap ties are
// normalized; the result stays optimal.
inline void canonicalize_assignment(const std::vector<std::vector<double>>& cost,
                                    std::vector<int>& row_to_col) {
  const int n = static_cast<int>(row_to_col.size());
  bool changed = true;
  int guard = 0;
  while (changed && guard++ < n * n) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        int a = row_to_col[i], b = row_to_col[j];
        if (b < a && cost[i][a] + cost[j][b] == cost[i][b] + cost[j][a]) {
          std::swap(row_to_col[i], row_to_col[j]);
          changed = true;
        }
      }
  }
}

// Assign P points to n sinks, sizes in {floor(P/n), ceil(P/n)}, minimizing
// total cost. cost(p, k) must be finite and nonnegative. Deterministic.
template <class CostFn>
std::vector<int> balanced_transport(int P, int n, CostFn&& cost) {
  require(n >= 1, Errc::BadInput, "need at least one sink");
  require(P >= n, Errc::BadInput, "need at least as many points as sinks");
  std::vector<int> assigned(P, -1);
  if (n == 1) {
    std::fill(assigned.begin(), assigned.end(), 0);
    return assigned;
  }

  const int q = P / n;       // base capacity per sink
  const int r = P % n;       // sinks allowed one extra point, shared pool
  const int X = n;           // overflow pool node
  const int T = n + 1;       // terminal
  const int V = n + 2;
  const double INF = std::numeric_limits<double>::infinity();

  std::vector<int> size(n, 0);
  int pool_used = 0;
  std::vector<double> y(V, 0.0);  // node potentials; reduced costs stay >= 0

  struct Entry {
    double delta;
    int p;
  };
  struct Cmp {
    bool operator()(const Entry& l, const Entry& r) const {
      return l.delta > r.delta || (l.delta == r.delta && l.p > r.p);
    }
  };
  // moves[a*n+b]: candidate reassignments a -> b, keyed by cost delta; entries
  // whose point has since left sink a are skipped lazily.
  std::vector<std::priority_queue<Entry, std::vector<Entry>, Cmp>> moves(
      static_cast<std::size_t>(n) * n);
  std::vector<double> cp(static_cast<std::size_t>(P) * n);

  auto push_moves = [&](int p, int a) {
    const double* c = &cp[static_cast<std::size_t>(p) * n];
    for (int b = 0; b < n; ++b)
      if (b != a) moves[static_cast<std::size_t>(a) * n + b].push({c[b] - c[a], p});
  };
  auto min_move = [&](int a, int b) -> const Entry* {
    auto& h = moves[static_cast<std::size_t>(a) * n + b];
    while (!h.empty() && assigned[h.top().p] != a) h.pop();
    return h.empty() ? nullptr : &h.top();
  };

  std::vector<double> dist(V);
  std::vector<int> parent(V), parent_pt(V);
  std::vector<char> done(V);

  for (int p = 0; p < P; ++p) {
    double* c = &cp[static_cast<std::size_t>(p) * n];
    for (int k = 0; k < n; ++k) {
      c[k] = cost(p, k);
      require(std::isfinite(c[k]) && c[k] >= 0.0, Errc::BadInput, "transport cost must be finite and nonnegative");
    }

    std::fill(dist.begin(), dist.end(), INF);
    std::fill(done.begin(), done.end(), 0);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(parent_pt.begin(), parent_pt.end(), -1);
    for (int k = 0; k < n; ++k) {
      dist[k] = c[k] - y[k];  // entry arc; may start negative, never relaxed
      parent[k] = -2;
    }

    auto relax = [&](int node, double d, int via, int witness) {
      if (d < dist[node]) {
        dist[node] = d;
        parent[node] = via;
        parent_pt[node] = witness;
      }
    };

    while (true) {
      int u = -1;
      double best = INF;
      for (int v2 = 0; v2 < V; ++v2)
        if (!done[v2] && dist[v2] < best) {
          best = dist[v2];
          u = v2;
        }
      assert(u != -1 && "terminal must stay reachable while capacity remains");
      done[u] = 1;
      if (u == T) break;

      if (u == X) {
        for (int a = 0; a < n; ++a)
          if (!done[a] && size[a] > q) relax(a, dist[X] + y[X] - y[a], X, -1);
        if (!done[T] && pool_used < r) relax(T, dist[X] + y[X] - y[T], X, -1);
      } else {
        const int a = u;
        if (!done[T] && size[a] < q) relax(T, dist[a] + y[a] - y[T], a, -1);
        if (!done[X] && size[a] <= q) relax(X, dist[a] + y[a] - y[X], a, -1);
        for (int b = 0; b < n; ++b) {
          if (b == a || done[b]) continue;
          const Entry* e = min_move(a, b);
          if (e != nullptr) relax(b, dist[a] + e->delta + y[a] - y[b], a, e->p);
        }
      }
    }

    const double D = dist[T];
    for (int v2 = 0; v2 < V; ++v2)
      if (done[v2]) y[v2] += dist[v2] - D;

    // Unwind the augmenting path and apply it: the entry sink gains the new
    // point, each move arc relocates its witness, pool bookkeeping is derived
    // from the sizes afterwards.
    std::vector<std::pair<int, int>> hops;  // (node, witness entering node)
    int node = T;
    while (parent[node] != -2) {
      hops.push_back({node, parent_pt[node]});
      node = parent[node];
      assert(node >= 0);
    }
    assigned[p] = node;
    size[node] += 1;
    push_moves(p, node);
    int prev = node;
    for (auto it = hops.rbegin(); it != hops.rend(); ++it) {
      const auto [to, witness] = *it;
      if (witness >= 0) {  // point move prev -> to
        assert(prev < n && to < n && assigned[witness] == prev);
        assigned[witness] = to;
        size[prev] -= 1;
        size[to] += 1;
        push_moves(witness, to);
      }
      prev = to;
    }
    pool_used = 0;
    for (int k = 0; k < n; ++k) {
      assert(size[k] <= q + 1);
      pool_used += std::max(size[k] - q, 0);
    }
    assert(pool_used <= r);
  }

  for (int k = 0; k < n; ++k) assert(size[k] >= q && size[k] <= q + 1);
  return assigned;
}

}  // namespace balsam
