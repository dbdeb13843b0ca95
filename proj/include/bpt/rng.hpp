#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace bpt {

// Deterministic random stream. Gaussian draws use Box-Muller instead of
// std::normal_distribution so that sequences are identical across standard
// library implementations (the trace CSV is a byte-exact contract).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n).
  std::uint64_t next_index(std::uint64_t n) { return n <= 1 ? 0 : gen_() % n; }

  // Standard normal draw.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed from a parent seed and a stream label. Used to give
// every trial, algorithm, and sampler its own independent stream.
inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t label) {
  return splitmix64(parent ^ (splitmix64(label) + 0x9e3779b97f4a7c15ULL +
                              (parent << 6) + (parent >> 2)));
}

// FNV-1a, for seeding streams by algorithm name.
inline std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bpt
