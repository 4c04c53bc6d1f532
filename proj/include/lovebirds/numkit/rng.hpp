#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lovebirds {

// Portable random stream.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++ standard.
// The distributions are implemented here rather than taken from <random>,
// because the standard leaves their algorithms to the library vendor:
//   uniform()       53 high bits of one draw, scaled to [0, 1)
//   below(n)        Lemire's multiply-shift with rejection
//   normal()        Box-Muller, both variates used, cached in pairs
//   gamma(k)        Marsaglia-Tsang (with the k < 1 boost)
// Same seed and same call sequence give the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  double gamma(double shape);
  std::vector<double> dirichlet(double alpha, std::size_t k);

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn proportionally to non-negative weights.
  std::size_t categorical(const std::vector<double>& weights);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives an independent child seed, e.g. per evaluation case.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lovebirds
