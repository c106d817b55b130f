#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "phishguard/agents/types.hpp"
#include "phishguard/email/features.hpp"

namespace phishguard::fusion {

inline constexpr int kNumAgents = 3;
inline constexpr int kInputDim = 9;
inline constexpr int kHiddenDim = 16;
inline constexpr double kAlphaFloor = 1e-3;
inline constexpr double kSimplexTol = 1e-9;

/* Agent weights in text, url, metadata order. */
struct WeightVector {
  std::array<double, kNumAgents> v{};

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  double sum() const { return v[0] + v[1] + v[2]; }
};

bool on_simplex(const WeightVector& w, double tol = kSimplexTol);

struct FusionInput {
  email::EmailFeatures features;
  std::array<double, kNumAgents> probs{};        /* p_i, phishing probability per agent */
  std::array<double, kNumAgents> confidences{};  /* raw confidence per agent */
};

/* Two separate perceptrons over the same 9-d input: the policy trunk emits
   log-concentrations for a Dirichlet over the weight simplex, the value trunk
   a scalar reward estimate. Matrices are row-major, rows = output units. */
struct PolicyParams {
  std::vector<double> w1;  /* kHiddenDim x kInputDim */
  std::vector<double> b1;  /* kHiddenDim */
  std::vector<double> w2;  /* kNumAgents x kHiddenDim */
  std::vector<double> b2;  /* kNumAgents */
  std::vector<double> u1;  /* kHiddenDim x kInputDim */
  std::vector<double> c1;  /* kHiddenDim */
  std::vector<double> u2;  /* kHiddenDim */
  double c2 = 0.0;
};

struct Episode {
  FusionInput input;
  WeightVector sampled_w;
  double log_prob_old = 0.0;
  double reward = 0.0;
  double advantage = 0.0;
};

struct PpoConfig {
  double epsilon = 0.2;
  double learning_rate = 3e-3;
  int epochs_per_batch = 4;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

struct PpoDiagnostics {
  double objective = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
};

struct DetectionResult {
  agents::Verdict label = agents::Verdict::Legitimate;
  double score = 0.0;
  WeightVector weights;
  std::array<agents::AgentReport, kNumAgents> reports;
};

}  // namespace phishguard::fusion
