#pragma once

#include <span>

#include "phishguard/fusion/types.hpp"
#include "phishguard/num/rng.hpp"

namespace phishguard::fusion {

/* p_i = confidence when the agent says Phishing, else its complement. */
double agent_prob(const agents::AgentVerdict& verdict);

/* Weighted sum of agent probabilities. Throws DimensionMismatch. */
double fuse(std::span<const double> w, std::span<const double> p);
double fuse(const WeightVector& w, const std::array<double, kNumAgents>& p);

agents::Verdict classify(double score, double threshold = 0.5);

double clip(double ratio, double epsilon);

std::array<double, kInputDim> build_policy_input(const email::EmailFeatures& features,
                                                 const std::array<double, kNumAgents>& confidences);
std::array<double, kInputDim> build_policy_input(const FusionInput& input);

std::size_t param_count();
PolicyParams zero_params();
PolicyParams init_params(std::uint64_t seed);

std::vector<double> flatten(const PolicyParams& params);
PolicyParams unflatten(const std::vector<double>& flat);

struct PolicyForward {
  std::array<double, kHiddenDim> hidden{};
  std::array<double, kNumAgents> logits{};
  std::array<double, kNumAgents> alpha{};
};

struct ValueForward {
  std::array<double, kHiddenDim> hidden{};
  double value = 0.0;
};

/* Throw NonFiniteActivation if anything in the pass is not finite. */
PolicyForward policy_forward(const PolicyParams& params, const std::array<double, kInputDim>& x);
ValueForward value_forward(const PolicyParams& params, const std::array<double, kInputDim>& x);

double dirichlet_log_pdf(const std::array<double, kNumAgents>& alpha, const WeightVector& w);
WeightVector dirichlet_sample(const std::array<double, kNumAgents>& alpha, num::RngStream& rng);

struct PolicySample {
  WeightVector w;
  double log_prob = 0.0;
};

PolicySample policy_sample(const PolicyParams& params, const std::array<double, kInputDim>& x,
                           num::RngStream& rng);

/* Dirichlet mean alpha / sum(alpha); the deterministic inference weights. */
WeightVector policy_mean(const PolicyParams& params, const std::array<double, kInputDim>& x);

}  // namespace phishguard::fusion
