#ifndef EDUML_RNG_H_
#define EDUML_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace eduml {

// Child seed for a named stage. All randomness in the library flows from one
// master seed through this function, so results never depend on call order.
uint64_t derive_seed(uint64_t parent, std::string_view stage,
                     uint64_t index = 0);

// Seeded generator with platform-independent sampling helpers. The standard
// distributions are implementation-defined, so they are not used here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t uniform_index(uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller.
  double normal();

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(uniform_index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace eduml

#endif  // EDUML_RNG_H_
