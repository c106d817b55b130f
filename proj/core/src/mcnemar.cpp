#include "phishguard/eval/mcnemar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phishguard/errors.hpp"

namespace phishguard::eval {

std::string_view to_string(TestMethod method) {
  return method == TestMethod::ExactBinomial ? "exact_binomial" : "mid_p";
}

namespace {

/* Dyadic-exact path: every C(n,k) and the partial sums fit in 64 bits for
   n <= 60, and 2^-n is a power of two, so the tail probability is computed
   without rounding. Larger n falls back to log-space summation. */
constexpr std::size_t kExactLimit = 60;

double tail_ge_small(std::size_t n, std::size_t k_from) {
  std::uint64_t sum = 0;
  std::uint64_t c = 1;  /* C(n,0) */
  for (std::size_t k = 0; k <= n; ++k) {
    if (k >= k_from) sum += c;
    if (k < n) c = c * (n - k) / (k + 1);
  }
  return static_cast<double>(sum) * std::ldexp(1.0, -static_cast<int>(n));
}

double pmf_small(std::size_t n, std::size_t k) {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return static_cast<double>(c) * std::ldexp(1.0, -static_cast<int>(n));
}

double log_pmf(std::size_t n, std::size_t k) {
  double nn = static_cast<double>(n);
  double kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) -
         nn * std::log(2.0);
}

double tail_ge_large(std::size_t n, std::size_t k_from) {
  /* ascending terms toward the mode; summing from the far tail keeps the
     small terms from being absorbed */
  double sum = 0.0;
  for (std::size_t k = n + 1; k-- > k_from;) sum += std::exp(log_pmf(n, k));
  return std::min(sum, 1.0);
}

double pmf_large(std::size_t n, std::size_t k) { return std::exp(log_pmf(n, k)); }

}  // namespace

double mcnemar_exact(std::size_t n10, std::size_t n01) {
  std::size_t n = n10 + n01;
  if (n == 0) return 1.0;
  if (n <= kExactLimit) return tail_ge_small(n, n10);
  return tail_ge_large(n, n10);
}

double mcnemar_midp(std::size_t n10, std::size_t n01) {
  std::size_t n = n10 + n01;
  if (n == 0) return 0.5;  /* P(X > 0) = 0 plus half of P(X = 0) = 1 */
  if (n <= kExactLimit) return tail_ge_small(n, n10 + 1) + 0.5 * pmf_small(n, n10);
  return std::min(tail_ge_large(n, n10 + 1) + 0.5 * pmf_large(n, n10), 1.0);
}

McNemarResult mcnemar(std::size_t n10, std::size_t n01) {
  McNemarResult result;
  if (n10 + n01 <= 25) {
    result.method = TestMethod::ExactBinomial;
    result.raw_p = mcnemar_exact(n10, n01);
  } else {
    result.method = TestMethod::MidP;
    result.raw_p = mcnemar_midp(n10, n01);
  }
  return result;
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
  for (double p : p_values) {
    require(p >= 0.0 && p <= 1.0, Errc::OutOfRange,
            "bh_adjust: p-value outside [0,1]: " + std::to_string(p));
  }
  std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  std::vector<double> adjusted(m, 0.0);
  double running = 1.0;
  for (std::size_t rank = m; rank-- > 0;) {
    double scaled = p_values[order[rank]] * static_cast<double>(m) /
                    static_cast<double>(rank + 1);
    running = std::min(running, scaled);
    adjusted[order[rank]] = std::min(running, 1.0);
  }
  return adjusted;
}

}  // namespace phishguard::eval
