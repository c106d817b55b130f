#include "phishguard/fusion/policy.hpp"

#include <algorithm>
#include <cmath>

#include "phishguard/errors.hpp"
#include "phishguard/num/special.hpp"

namespace phishguard::fusion {

bool on_simplex(const WeightVector& w, double tol) {
  for (double x : w.v) {
    if (!(x >= 0.0)) return false;
  }
  return std::fabs(w.sum() - 1.0) <= tol;
}

double agent_prob(const agents::AgentVerdict& verdict) {
  return verdict.verdict == agents::Verdict::Phishing ? verdict.confidence
                                                      : 1.0 - verdict.confidence;
}

double fuse(std::span<const double> w, std::span<const double> p) {
  require(w.size() == p.size(), Errc::DimensionMismatch,
          "fuse: weight and probability lengths differ");
  double y = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) y += w[i] * p[i];
  return y;
}

double fuse(const WeightVector& w, const std::array<double, kNumAgents>& p) {
  return fuse(std::span<const double>(w.v), std::span<const double>(p));
}

agents::Verdict classify(double score, double threshold) {
  return score >= threshold ? agents::Verdict::Phishing : agents::Verdict::Legitimate;
}

double clip(double ratio, double epsilon) {
  return std::min(std::max(ratio, 1.0 - epsilon), 1.0 + epsilon);
}

std::array<double, kInputDim> build_policy_input(const email::EmailFeatures& f,
                                                 const std::array<double, kNumAgents>& c) {
  return {std::log1p(static_cast<double>(f.url_count)) / 5.0,
          std::log1p(static_cast<double>(f.keyword_hits)) / 5.0,
          f.domain_reputation,
          static_cast<double>(f.spf_code),
          static_cast<double>(f.dkim_code),
          static_cast<double>(f.dmarc_code),
          c[0],
          c[1],
          c[2]};
}

std::array<double, kInputDim> build_policy_input(const FusionInput& input) {
  return build_policy_input(input.features, input.confidences);
}

std::size_t param_count() {
  return static_cast<std::size_t>(kHiddenDim * kInputDim + kHiddenDim   /* w1, b1 */
                                  + kNumAgents * kHiddenDim + kNumAgents /* w2, b2 */
                                  + kHiddenDim * kInputDim + kHiddenDim  /* u1, c1 */
                                  + kHiddenDim + 1);                     /* u2, c2 */
}

PolicyParams zero_params() {
  PolicyParams p;
  p.w1.assign(kHiddenDim * kInputDim, 0.0);
  p.b1.assign(kHiddenDim, 0.0);
  p.w2.assign(kNumAgents * kHiddenDim, 0.0);
  p.b2.assign(kNumAgents, 0.0);
  p.u1.assign(kHiddenDim * kInputDim, 0.0);
  p.c1.assign(kHiddenDim, 0.0);
  p.u2.assign(kHiddenDim, 0.0);
  p.c2 = 0.0;
  return p;
}

PolicyParams init_params(std::uint64_t seed) {
  num::RngStream rng(seed);
  PolicyParams p = zero_params();
  auto fill = [&rng](std::vector<double>& w, int fan_in) {
    double scale = std::sqrt(1.0 / fan_in);
    for (double& x : w) x = rng.normal() * scale;
  };
  fill(p.w1, kInputDim);
  fill(p.w2, kHiddenDim);
  fill(p.u1, kInputDim);
  fill(p.u2, kHiddenDim);
  return p;
}

std::vector<double> flatten(const PolicyParams& p) {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const auto* block : {&p.w1, &p.b1, &p.w2, &p.b2, &p.u1, &p.c1, &p.u2}) {
    flat.insert(flat.end(), block->begin(), block->end());
  }
  flat.push_back(p.c2);
  return flat;
}

PolicyParams unflatten(const std::vector<double>& flat) {
  require(flat.size() == param_count(), Errc::DimensionMismatch,
          "unflatten: wrong coefficient count");
  PolicyParams p = zero_params();
  std::size_t pos = 0;
  for (auto* block : {&p.w1, &p.b1, &p.w2, &p.b2, &p.u1, &p.c1, &p.u2}) {
    std::copy_n(flat.begin() + pos, block->size(), block->begin());
    pos += block->size();
  }
  p.c2 = flat[pos];
  return p;
}

namespace {

void hidden_layer(const std::vector<double>& w, const std::vector<double>& b,
                  const std::array<double, kInputDim>& x, std::array<double, kHiddenDim>& out) {
  for (int j = 0; j < kHiddenDim; ++j) {
    double acc = b[j];
    const double* row = w.data() + static_cast<std::size_t>(j) * kInputDim;
    for (int k = 0; k < kInputDim; ++k) acc += row[k] * x[k];
    out[j] = std::tanh(acc);
  }
}

void check_finite_input(const std::array<double, kInputDim>& x) {
  for (double v : x) {
    require(std::isfinite(v), Errc::NonFiniteActivation, "policy input is not finite");
  }
}

}  // namespace

PolicyForward policy_forward(const PolicyParams& params, const std::array<double, kInputDim>& x) {
  check_finite_input(x);
  PolicyForward fwd;
  hidden_layer(params.w1, params.b1, x, fwd.hidden);
  for (int i = 0; i < kNumAgents; ++i) {
    double acc = params.b2[i];
    const double* row = params.w2.data() + static_cast<std::size_t>(i) * kHiddenDim;
    for (int j = 0; j < kHiddenDim; ++j) acc += row[j] * fwd.hidden[j];
    fwd.logits[i] = acc;
    fwd.alpha[i] = std::exp(acc) + kAlphaFloor;
    require(std::isfinite(fwd.alpha[i]), Errc::NonFiniteActivation,
            "policy concentration overflow");
  }
  return fwd;
}

ValueForward value_forward(const PolicyParams& params, const std::array<double, kInputDim>& x) {
  check_finite_input(x);
  ValueForward fwd;
  hidden_layer(params.u1, params.c1, x, fwd.hidden);
  double acc = params.c2;
  for (int j = 0; j < kHiddenDim; ++j) acc += params.u2[j] * fwd.hidden[j];
  require(std::isfinite(acc), Errc::NonFiniteActivation, "value head overflow");
  fwd.value = acc;
  return fwd;
}

double dirichlet_log_pdf(const std::array<double, kNumAgents>& alpha, const WeightVector& w) {
  double alpha_sum = 0.0;
  double logp = 0.0;
  for (int i = 0; i < kNumAgents; ++i) {
    require(alpha[i] > 0.0, Errc::Precondition, "dirichlet concentration must be positive");
    alpha_sum += alpha[i];
    double wi = std::max(w[i], 1e-300);
    logp += (alpha[i] - 1.0) * std::log(wi) - std::lgamma(alpha[i]);
  }
  logp += std::lgamma(alpha_sum);
  return logp;
}

WeightVector dirichlet_sample(const std::array<double, kNumAgents>& alpha, num::RngStream& rng) {
  WeightVector w;
  double total = 0.0;
  for (int i = 0; i < kNumAgents; ++i) {
    /* floor keeps the log-density finite if a tiny-alpha draw underflows */
    w[i] = std::max(rng.gamma(alpha[i]), 1e-290);
    total += w[i];
  }
  require(std::isfinite(total) && total > 0.0, Errc::NonFiniteActivation,
          "dirichlet sample degenerate");
  for (int i = 0; i < kNumAgents; ++i) w[i] /= total;
  return w;
}

PolicySample policy_sample(const PolicyParams& params, const std::array<double, kInputDim>& x,
                           num::RngStream& rng) {
  PolicyForward fwd = policy_forward(params, x);
  PolicySample sample;
  sample.w = dirichlet_sample(fwd.alpha, rng);
  sample.log_prob = dirichlet_log_pdf(fwd.alpha, sample.w);
  require(std::isfinite(sample.log_prob), Errc::NonFiniteActivation,
          "dirichlet log-density not finite");
  return sample;
}

WeightVector policy_mean(const PolicyParams& params, const std::array<double, kInputDim>& x) {
  PolicyForward fwd = policy_forward(params, x);
  double total = fwd.alpha[0] + fwd.alpha[1] + fwd.alpha[2];
  WeightVector w;
  for (int i = 0; i < kNumAgents; ++i) w[i] = fwd.alpha[i] / total;
  return w;
}

}  // namespace phishguard::fusion
