#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace phishguard::num {

/* Deterministic random stream. All draws go through uniform() built from raw
   mt19937_64 output, so sequences are identical across platforms and never
   depend on libstdc++ distribution internals. */
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return eng_(); }

  /* [0, 1), 53-bit resolution. */
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /* (0, 1), safe for log(). */
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  /* Unbiased integer in [0, n). n must be > 0. */
  std::size_t uniform_index(std::size_t n);

  /* Standard normal via Marsaglia polar method. */
  double normal();

  /* Gamma(shape, 1) via Marsaglia-Tsang squeeze; boosts shape < 1. */
  double gamma(double shape);

  /* Independent stream for a labeled subtask (round index, worker id, ...),
     derived from this stream's seed without consuming any draws. */
  RngStream fork(std::uint64_t stream_id) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace phishguard::num
