#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace meqc {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Counter-based generator: every draw is a pure function of
/// (seed, field tag, entity index, draw number). Adding entities never
/// perturbs draws already made for other entities.
class KeyedRng {
 public:
  explicit constexpr KeyedRng(std::uint64_t seed) : key_(detail::splitmix64(seed)) {}

  constexpr std::uint64_t bits(std::uint64_t tag, std::uint64_t index,
                               std::uint64_t draw = 0) const {
    std::uint64_t h = detail::splitmix64(key_ ^ detail::splitmix64(tag));
    h = detail::splitmix64(h ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL));
    return detail::splitmix64(h ^ draw);
  }

  // Uniform on [0, 1).
  constexpr double uniform(std::uint64_t tag, std::uint64_t index,
                           std::uint64_t draw = 0) const {
    return detail::to_unit(bits(tag, index, draw));
  }

  // Uniform on the closed interval [lo, hi].
  double uniform(double lo, double hi, std::uint64_t tag, std::uint64_t index,
                 std::uint64_t draw = 0) const {
    const double u = static_cast<double>(bits(tag, index, draw) >> 11) / double((1ULL << 53) - 1);
    return lo + (hi - lo) * u;
  }

  // Uniform integer on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi, std::uint64_t tag,
                           std::uint64_t index, std::uint64_t draw = 0) const {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(bits(tag, index, draw) % span);
  }

  // Independent child generator (e.g. one per episode).
  constexpr KeyedRng fork(std::uint64_t stream) const {
    KeyedRng child(0);
    child.key_ = detail::splitmix64(key_ ^ detail::splitmix64(~stream));
    return child;
  }

 private:
  std::uint64_t key_;
};

/// Sequential generator for sampling during rollouts and baselines.
/// std::mt19937_64's output sequence is fixed by the standard; the
/// distribution transforms below are written out so results do not depend
/// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return detail::to_unit(engine_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Draw from a discrete distribution given normalized probabilities.
  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::span<T> xs) {
    for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace meqc
