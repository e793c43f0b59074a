#pragma once

// Finite population frame: coordinates, inclusion probabilities, samples,
// joint-inclusion matrices, validation and CSV round-trip.
//
// Units are 0-based internally; every external surface (CSV, JSON, CLI,
// error messages) uses 1-based ids.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "balsam/common.hpp"

namespace balsam {

// Flat row-major point storage; avoids vector-of-vectors in the hot loops.
struct Coords {
  int dim = 0;
  std::vector<double> data;

  Coords() = default;
  Coords(int d, int count) : dim(d), data(static_cast<std::size_t>(d) * count, 0.0) {}

  int size() const { return dim == 0 ? 0 : static_cast<int>(data.size()) / dim; }
  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * dim; }
  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * dim; }
  double& at(int i, int d) { return data[static_cast<std::size_t>(i) * dim + d]; }
  double at(int i, int d) const { return data[static_cast<std::size_t>(i) * dim + d]; }

  void push_row(const double* p) { data.insert(data.end(), p, p + dim); }

  Coords select(const std::vector<int>& rows) const {
    Coords out(dim, static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      std::copy(row(rows[i]), row(rows[i]) + dim, out.row(static_cast<int>(i)));
    return out;
  }
};

inline double sq_dist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

inline double euclid(const double* a, const double* b, int dim) {
  return std::sqrt(sq_dist(a, b, dim));
}

struct Population {
  Coords coords;           // N x D
  std::vector<double> pi;  // inclusion probabilities in (0,1]

  int size() const { return static_cast<int>(pi.size()); }
  int dim() const { return coords.dim; }
};

// A drawn sample: ascending unit indices, plus the uniform draw that produced
// it when the design is graphical.
struct Sample {
  std::vector<int> units;
  std::optional<double> r;

  int size() const { return static_cast<int>(units.size()); }
};

struct JointInclusionMatrix {
  int n = 0;
  std::vector<double> p;  // dense n x n, symmetric, diagonal = first-order

  explicit JointInclusionMatrix(int size = 0) : n(size), p(static_cast<std::size_t>(size) * size, 0.0) {}
  double& at(int i, int j) { return p[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return p[static_cast<std::size_t>(i) * n + j]; }
};

// Checks totals, ranges and coordinate sanity; returns the integer sample
// size n = sum(pi).
inline int validate_population(const Population& pop) {
  const int N = pop.size();
  require(N > 0, Errc::BadInput, "population is empty");
  require(pop.coords.size() == N, Errc::DimensionMismatch,
          "coordinate rows do not match probability count");
  require(pop.dim() >= 1, Errc::DimensionMismatch, "coordinates need at least one dimension");
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    double p = pop.pi[i];
    require(std::isfinite(p) && p > 0.0 && p <= 1.0, Errc::OutOfRangeProbability,
            "unit " + std::to_string(i + 1) + " has probability outside (0,1]");
    for (int d = 0; d < pop.dim(); ++d)
      require(std::isfinite(pop.coords.at(i, d)), Errc::NonFiniteCoordinate,
              "unit " + std::to_string(i + 1) + " has a non-finite coordinate");
    total += p;
  }
  double rounded = std::nearbyint(total);
  require(std::abs(total - rounded) <= 1e-9, Errc::NonIntegerTotal,
          "probabilities sum to " + std::to_string(total) + ", not an integer");
  int n = static_cast<int>(rounded);
  require(n >= 1, Errc::InfeasibleProbabilities, "sample size must be at least 1");
  require(n <= N, Errc::InfeasibleProbabilities, "sample size exceeds population size");
  return n;
}

// --- CSV -------------------------------------------------------------------
// Header is `id,x,y,pi` for D = 2 or `id,c1,...,cD,pi` in general; ids must
// run 1..N in order. Values are written with 17 significant digits.

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    require(pos == s.size(), Errc::BadInput, std::string("trailing characters in ") + what + ": '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::BadInput, std::string("cannot parse ") + what + ": '" + s + "'");
  }
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Population read_population_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::BadInput, "empty population file");
  auto header = detail::split_csv_line(line);
  require(header.size() >= 3 && header.front() == "id" && header.back() == "pi",
          Errc::BadInput, "population header must be id,<coords...>,pi");
  const int dim = static_cast<int>(header.size()) - 2;

  Population pop;
  pop.coords.dim = dim;
  int expect = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    require(static_cast<int>(f.size()) == dim + 2, Errc::BadInput,
            "row " + std::to_string(expect) + " has wrong field count");
    long id = std::lround(detail::parse_double(f[0], "id"));
    require(id == expect, Errc::BadInput,
            "ids must run 1..N in order; saw " + std::to_string(id) + " at row " + std::to_string(expect));
    for (int d = 0; d < dim; ++d) pop.coords.data.push_back(detail::parse_double(f[1 + d], "coordinate"));
    pop.pi.push_back(detail::parse_double(f[dim + 1], "pi"));
    ++expect;
  }
  require(!pop.pi.empty(), Errc::BadInput, "population file has no rows");
  return pop;
}

inline Population read_population_csv_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::BadInput, "cannot open " + path);
  return read_population_csv(in);
}

inline void write_population_csv(std::ostream& out, const Population& pop) {
  const int dim = pop.dim();
  if (dim == 2) {
    out << "id,x,y,pi\n";
  } else {
    out << "id";
    for (int d = 1; d <= dim; ++d) out << ",c" << d;
    out << ",pi\n";
  }
  for (int i = 0; i < pop.size(); ++i) {
    out << (i + 1);
    for (int d = 0; d < dim; ++d) out << ',' << detail::fmt17(pop.coords.at(i, d));
    out << ',' << detail::fmt17(pop.pi[i]) << '\n';
  }
}

}  // namespace balsam
