#include "phishguard/num/rng.hpp"

#include <cmath>

#include "phishguard/errors.hpp"

namespace phishguard::num {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::size_t RngStream::uniform_index(std::size_t n) {
  require(n > 0, Errc::Precondition, "uniform_index needs n > 0");
  std::uint64_t span = static_cast<std::uint64_t>(n);
  std::uint64_t threshold = (-span) % span;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r < threshold);
  return static_cast<std::size_t>(r % span);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = uniform(-1.0, 1.0);
    v = uniform(-1.0, 1.0);
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::gamma(double shape) {
  require(shape > 0.0, Errc::Precondition, "gamma shape must be positive");
  if (shape < 1.0) {
    double u = uniform_pos();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform_pos();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

RngStream RngStream::fork(std::uint64_t stream_id) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(stream_id + 1)));
}

}  // namespace phishguard::num
