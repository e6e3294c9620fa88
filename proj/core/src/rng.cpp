#include "wordrep/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wordrep {

uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t hash_mix(uint64_t a, uint64_t b) {
  uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  return splitmix64(x);
}

namespace {
inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(uint64_t seed) : key_(seed) {
  uint64_t x = seed;
  for (auto& si : s_) si = splitmix64(x);
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

uint64_t Rng::uniform_int(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::uniform_int: n must be > 0");
  const uint64_t threshold = (0 - n) % n;  // reject below to remove bias
  for (;;) {
    uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double Rng::normal(double mean, double stddev) {
  if (has_gauss_spare_) {
    has_gauss_spare_ = false;
    return mean + stddev * gauss_spare_;
  }
  // Box-Muller; u clamped away from 0 so log stays finite.
  double u = uniform01();
  if (u < 0x1.0p-53) u = 0x1.0p-53;
  const double v = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double theta = 2.0 * std::numbers::pi * v;
  gauss_spare_ = r * std::sin(theta);
  has_gauss_spare_ = true;
  return mean + stddev * r * std::cos(theta);
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

Rng Rng::child(uint64_t tag) const { return Rng(hash_mix(key_, tag)); }

Rng Rng::child(std::string_view tag) const {
  uint64_t h = 1469598103934665603ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return child(h);
}

Rng::State Rng::state() const {
  return State{key_, s_, gauss_spare_, has_gauss_spare_};
}

void Rng::set_state(const State& st) {
  key_ = st.key;
  s_ = st.s;
  gauss_spare_ = st.gauss_spare;
  has_gauss_spare_ = st.has_gauss_spare;
}

}  // namespace wordrep
