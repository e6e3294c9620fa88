#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace wordrep {

uint64_t splitmix64(uint64_t& x);
uint64_t hash_mix(uint64_t a, uint64_t b);

// Deterministic xoshiro256** stream. Distribution transforms are implemented
// here rather than taken from <random> so that identical seeds produce
// identical draws on every platform and standard library. Substreams are
// derived from the stream's key, not its position, so deriving a child never
// perturbs the parent.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  double uniform01();                   // [0, 1)
  double uniform(double lo, double hi);
  uint64_t uniform_int(uint64_t n);     // [0, n), unbiased
  double normal(double mean = 0.0, double stddev = 1.0);
  bool bernoulli(double p);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  Rng child(uint64_t tag) const;
  Rng child(std::string_view tag) const;

  struct State {
    uint64_t key = 0;
    std::array<uint64_t, 4> s{};
    double gauss_spare = 0.0;
    bool has_gauss_spare = false;
  };
  State state() const;
  void set_state(const State& st);

 private:
  Rng() = default;

  uint64_t key_ = 0;
  std::array<uint64_t, 4> s_{};
  double gauss_spare_ = 0.0;
  bool has_gauss_spare_ = false;
};

}  // namespace wordrep
