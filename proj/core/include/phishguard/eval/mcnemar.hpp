#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace phishguard::eval {

enum class TestMethod { ExactBinomial, MidP };

std::string_view to_string(TestMethod method);

struct McNemarResult {
  TestMethod method = TestMethod::ExactBinomial;
  double raw_p = 1.0;
  std::optional<double> adj_p;
};

/* One-sided exact binomial tail P(X >= n10 | n10+n01, 1/2); 1.0 when both
   counts are zero. */
double mcnemar_exact(std::size_t n10, std::size_t n01);

/* One-sided mid-p: P(X > n10) + 0.5 * P(X = n10), exact summation. */
double mcnemar_midp(std::size_t n10, std::size_t n01);

/* Routing rule: exact for n10+n01 <= 25, mid-p above. adj_p left empty. */
McNemarResult mcnemar(std::size_t n10, std::size_t n01);

/* Step-up Benjamini-Hochberg, capped at 1, result in input order.
   Throws OutOfRange for values outside [0,1]. */
std::vector<double> bh_adjust(const std::vector<double>& p_values);

}  // namespace phishguard::eval
