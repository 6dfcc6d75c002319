#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace elicit {

// The artifact's random stream: std::mt19937_64, whose output sequence is fixed
// by the C++ standard. Uniforms and normals are derived here by hand (not via
// <random> distributions) so that samples are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // 53-bit uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1), never 0.
  double uniform_open();
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Seed for a sub-stream, a deterministic function of the parent seed and the
// given indices (std::seed_seq is specified exactly by the standard).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> indices);

}  // namespace elicit
