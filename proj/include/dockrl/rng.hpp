#ifndef DOCKRL_RNG_HPP_
#define DOCKRL_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dockrl {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for an independent stream identified by (master, tags...).
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t));
  return h;
}

// Stream tags used across the project.
enum class Stream : std::uint64_t {
  kEnv = 1,
  kExploration = 2,
  kSampling = 3,
  kInit = 4,
  kEvaluation = 5,
};

inline Rng make_rng(std::uint64_t master, Stream stream) {
  return Rng(derive_seed(master, {static_cast<std::uint64_t>(stream)}));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace dockrl

#endif  // DOCKRL_RNG_HPP_
