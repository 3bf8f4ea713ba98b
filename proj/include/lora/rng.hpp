#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

// Self-contained RNG for the Monte-Carlo engine. Two requirements drive the
// hand-rolled choice over <random>: per-trial substreams derived purely from
// (seed, trial index) so results are bit-identical at any thread count, and
// samplers whose draw sequences are pinned by this code, not by a standard
// library implementation.

namespace lora::mc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** seeded through splitmix64.
class Rng {
 public:
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t st = seed;
    std::uint64_t mixed = splitmix64(st) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    Rng rng;
    for (auto& word : rng.s_) word = splitmix64(mixed);
    return rng;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    return mean < 10.0 ? poisson_knuth(mean) : poisson_ptrs(mean);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t poisson_knuth(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform01();
    while (prod > limit) {
      ++k;
      prod *= uniform01();
    }
    return k;
  }

  // Hoermann's transformed rejection (PTRS), valid for mean >= 10.
  std::uint64_t poisson_ptrs(double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
      double u = uniform01() - 0.5;
      double v = uniform01();
      double us = 0.5 - std::fabs(u);
      double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * log_mean - mean - std::lgamma(k + 1.0))
        return static_cast<std::uint64_t>(k);
    }
  }

  std::uint64_t s_[4] = {};
};

// Deterministic block-parallel trial runner. Trials are split into fixed-size
// blocks; worker threads claim blocks dynamically, but each trial's RNG is a
// pure function of (seed, trial index) and block partials are reduced in
// block order, so the result is bit-identical for any thread count.
//
// Acc needs: default construction meaning "empty" and merge(const Acc&).
template <class Acc, class PerTrial>
Acc run_trials(std::uint64_t trials, std::uint64_t seed, int threads, PerTrial&& per_trial) {
  constexpr std::uint64_t kBlock = 1024;
  const std::uint64_t nblocks = (trials + kBlock - 1) / kBlock;
  std::vector<Acc> partials(nblocks);
  std::atomic<std::uint64_t> cursor{0};

  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = cursor.fetch_add(1, std::memory_order_relaxed);
      if (b >= nblocks) return;
      Acc acc;
      const std::uint64_t lo = b * kBlock;
      const std::uint64_t hi = std::min(trials, lo + kBlock);
      for (std::uint64_t t = lo; t < hi; ++t) {
        Rng rng = Rng::substream(seed, t);
        per_trial(rng, acc);
      }
      partials[b] = acc;
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Acc total;
  for (const Acc& p : partials) total.merge(p);
  return total;
}

}  // namespace lora::mc
