#pragma once

#include "phishguard/fusion/policy.hpp"

namespace phishguard::fusion {

/* Zero mean, unit variance across the batch when it holds 8 or more
   episodes; smaller batches keep raw reward - value advantages. */
void normalize_advantages(std::vector<Episode>& batch);

/* Mean clipped-surrogate objective minus 0.5 * squared value error. */
double compute_objective(const PolicyParams& params, const std::vector<Episode>& batch,
                         const PpoConfig& cfg);

struct GradientResult {
  PolicyParams grad;  /* ascent direction, same shapes as the params */
  PpoDiagnostics diagnostics;
};

/* Analytic gradient of compute_objective. Throws NonFiniteGradient. */
GradientResult compute_gradient(const PolicyParams& params, const std::vector<Episode>& batch,
                                const PpoConfig& cfg);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

/* One ascent step over the flat parameter vector. */
void adam_step(std::vector<double>& flat, const std::vector<double>& grad, AdamState& state,
               double learning_rate);

struct UpdateResult {
  PolicyParams params;
  PpoDiagnostics diagnostics;  /* from the first epoch: ratios vs the sampling policy */
};

/* epochs_per_batch ascent steps on one batch. Advantages must already be
   populated (train() normalizes them). When optimizer is null a fresh Adam
   state is used for this batch only. */
UpdateResult ppo_update(const PolicyParams& params, const std::vector<Episode>& batch,
                        const PpoConfig& cfg, AdamState* optimizer = nullptr);

}  // namespace phishguard::fusion
