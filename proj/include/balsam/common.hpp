#pragma once

// Error codes, seeded RNG streams, exact-decimal fixed point.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace balsam {

enum class Errc {
  NonIntegerTotal,
  OutOfRangeProbability,
  NonFiniteCoordinate,
  ZeroProbabilityMember,
  DimensionMismatch,
  ZeroJointProbability,
  ExpansionTooLarge,
  EmptySample,
  SingularQ,
  CoincidentNeighbors,
  DegenerateSample,
  CardinalityMismatch,
  InconsistentBorders,
  InfeasibleProbabilities,
  BadInput,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonIntegerTotal: return "NonIntegerTotal";
    case Errc::OutOfRangeProbability: return "OutOfRangeProbability";
    case Errc::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case Errc::ZeroProbabilityMember: return "ZeroProbabilityMember";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroJointProbability: return "ZeroJointProbability";
    case Errc::ExpansionTooLarge: return "ExpansionTooLarge";
    case Errc::EmptySample: return "EmptySample";
    case Errc::SingularQ: return "SingularQ";
    case Errc::CoincidentNeighbors: return "CoincidentNeighbors";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::CardinalityMismatch: return "CardinalityMismatch";
    case Errc::InconsistentBorders: return "InconsistentBorders";
    case Errc::InfeasibleProbabilities: return "InfeasibleProbabilities";
    case Errc::BadInput: return "BadInput";
  }
  return "UnknownError";
}

struct Error : std::runtime_error {
  Errc code;
  Error(Errc c, const std::string& what)
      : std::runtime_error(std::string(errc_name(c)) + ": " + what), code(c) {}
};

[[noreturn]] inline void fail(Errc c, const std::string& what) { throw Error(c, what); }

inline void require(bool ok, Errc c, const std::string& what) {
  if (!ok) fail(c, what);
}

// ---------------------------------------------------------------------------
// Seeding. splitmix64 is used only to derive independent stream seeds from a
// master seed; all actual draws come from mt19937_64 streams.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  return splitmix64(master ^ splitmix64(tag ^ 0x5bf0'3635'dea8'27edull));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0,1)
  double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n), n >= 1
  std::uint64_t next_below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(gen_);
  }

  double next_normal(double mean, double sd) {
    std::normal_distribution<double> d(mean, sd);
    return d(gen_);
  }

  long next_poisson(double mean) {
    std::poisson_distribution<long> d(mean);
    return d(gen_);
  }

  std::mt19937_64& raw() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Exact decimal fixed point. Probabilities with at most 12 decimal digits are
// carried as int64 multiples of 1e-12 so bar layouts, joint inclusions and
// quota cuts come out exact; anything else falls back to floating point.

inline constexpr std::int64_t kDecScale = 1'000'000'000'000LL;  // 1e12

inline std::optional<std::int64_t> to_fixed12(double v) {
  double scaled = v * 1e12;
  if (!(std::abs(scaled) < 9.0e18)) return std::nullopt;
  double r = std::nearbyint(scaled);
  if (std::abs(scaled - r) > 1e-3) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

inline std::optional<std::vector<std::int64_t>> to_fixed12(const std::vector<double>& v) {
  std::vector<std::int64_t> out;
  out.reserve(v.size());
  for (double x : v) {
    auto f = to_fixed12(x);
    if (!f) return std::nullopt;
    out.push_back(*f);
  }
  return out;
}

inline double from_fixed12(std::int64_t v) { return static_cast<double>(v) / 1e12; }

}  // namespace balsam
