#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace rcdenoise {

/// splitmix64 finalizer; used to derive independent stream seeds.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for a named sub-stream of `base`, e.g. derive_seed(seed, {channel, 7}).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept;
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double mean = 0.0, double sigma = 1.0) { return std::normal_distribution<double>(mean, sigma)(engine_); }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Radical inverse of `index` in the given prime base (Halton coordinate).
[[nodiscard]] double radical_inverse(std::uint64_t index, unsigned base) noexcept;

}  // namespace rcdenoise
