#include "phishguard/fusion/ppo.hpp"

#include <cmath>

#include "phishguard/errors.hpp"
#include "phishguard/num/special.hpp"

namespace phishguard::fusion {

void normalize_advantages(std::vector<Episode>& batch) {
  if (batch.size() < 8) return;
  double mean = 0.0;
  for (const Episode& e : batch) mean += e.advantage;
  mean /= static_cast<double>(batch.size());
  double var = 0.0;
  for (const Episode& e : batch) {
    double d = e.advantage - mean;
    var += d * d;
  }
  var /= static_cast<double>(batch.size());
  double denom = std::sqrt(var) + 1e-8;
  for (Episode& e : batch) e.advantage = (e.advantage - mean) / denom;
}

namespace {

struct EpisodeEval {
  std::array<double, kInputDim> x{};
  PolicyForward pol;
  ValueForward val;
  double ratio = 0.0;
  double surrogate = 0.0;
  bool unclipped_active = false;
  bool ratio_clipped = false;
};

EpisodeEval eval_episode(const PolicyParams& params, const Episode& ep, double epsilon) {
  EpisodeEval ev;
  ev.x = build_policy_input(ep.input);
  ev.pol = policy_forward(params, ev.x);
  ev.val = value_forward(params, ev.x);
  double log_prob_new = dirichlet_log_pdf(ev.pol.alpha, ep.sampled_w);
  ev.ratio = std::exp(log_prob_new - ep.log_prob_old);
  double unclipped = ev.ratio * ep.advantage;
  double clipped = clip(ev.ratio, epsilon) * ep.advantage;
  ev.surrogate = std::min(unclipped, clipped);
  ev.unclipped_active = unclipped <= clipped;
  ev.ratio_clipped = ev.ratio < 1.0 - epsilon || ev.ratio > 1.0 + epsilon;
  return ev;
}

template <typename Params, typename Fn>
void for_each_block(Params& p, Fn&& fn) {
  fn(p.w1);
  fn(p.b1);
  fn(p.w2);
  fn(p.b2);
  fn(p.u1);
  fn(p.c1);
  fn(p.u2);
}

bool params_finite(const PolicyParams& p) {
  bool ok = std::isfinite(p.c2);
  for_each_block(p, [&ok](const std::vector<double>& block) {
    for (double x : block) ok = ok && std::isfinite(x);
  });
  return ok;
}

}  // namespace

double compute_objective(const PolicyParams& params, const std::vector<Episode>& batch,
                         const PpoConfig& cfg) {
  require(!batch.empty(), Errc::EmptyBatch, "compute_objective: empty batch");
  double total = 0.0;
  for (const Episode& ep : batch) {
    EpisodeEval ev = eval_episode(params, ep, cfg.epsilon);
    double verr = ev.val.value - ep.reward;
    total += ev.surrogate - 0.5 * verr * verr;
  }
  return total / static_cast<double>(batch.size());
}

GradientResult compute_gradient(const PolicyParams& params, const std::vector<Episode>& batch,
                                const PpoConfig& cfg) {
  require(!batch.empty(), Errc::EmptyBatch, "compute_gradient: empty batch");
  GradientResult out;
  out.grad = zero_params();
  PolicyParams& g = out.grad;
  double objective_sum = 0.0;
  double ratio_sum = 0.0;
  std::size_t clipped_count = 0;

  for (const Episode& ep : batch) {
    EpisodeEval ev = eval_episode(params, ep, cfg.epsilon);
    double verr = ev.val.value - ep.reward;
    objective_sum += ev.surrogate - 0.5 * verr * verr;
    ratio_sum += ev.ratio;
    if (ev.ratio_clipped) ++clipped_count;

    /* policy head: gradient flows only while the unclipped term is the min */
    if (ev.unclipped_active) {
      double coeff = ev.ratio * ep.advantage;
      double alpha_sum = ev.pol.alpha[0] + ev.pol.alpha[1] + ev.pol.alpha[2];
      double psi_sum = num::digamma(alpha_sum);
      std::array<double, kNumAgents> dz{};
      for (int i = 0; i < kNumAgents; ++i) {
        double dlogp = psi_sum - num::digamma(ev.pol.alpha[i]) +
                       std::log(std::max(ep.sampled_w[i], 1e-300));
        dz[i] = coeff * dlogp * std::exp(ev.pol.logits[i]);
      }
      std::array<double, kHiddenDim> dhidden{};
      for (int i = 0; i < kNumAgents; ++i) {
        const double* row = params.w2.data() + static_cast<std::size_t>(i) * kHiddenDim;
        double* grow = g.w2.data() + static_cast<std::size_t>(i) * kHiddenDim;
        for (int j = 0; j < kHiddenDim; ++j) {
          grow[j] += dz[i] * ev.pol.hidden[j];
          dhidden[j] += dz[i] * row[j];
        }
        g.b2[i] += dz[i];
      }
      for (int j = 0; j < kHiddenDim; ++j) {
        double dpre = dhidden[j] * (1.0 - ev.pol.hidden[j] * ev.pol.hidden[j]);
        double* grow = g.w1.data() + static_cast<std::size_t>(j) * kInputDim;
        for (int k = 0; k < kInputDim; ++k) grow[k] += dpre * ev.x[k];
        g.b1[j] += dpre;
      }
    }

    /* value head: ascent on -0.5 * (v - reward)^2 */
    double dv = -verr;
    for (int j = 0; j < kHiddenDim; ++j) {
      g.u2[j] += dv * ev.val.hidden[j];
      double dpre = dv * params.u2[j] * (1.0 - ev.val.hidden[j] * ev.val.hidden[j]);
      double* grow = g.u1.data() + static_cast<std::size_t>(j) * kInputDim;
      for (int k = 0; k < kInputDim; ++k) grow[k] += dpre * ev.x[k];
      g.c1[j] += dpre;
    }
    g.c2 += dv;
  }

  double inv_n = 1.0 / static_cast<double>(batch.size());
  for_each_block(g, [inv_n](std::vector<double>& block) {
    for (double& x : block) x *= inv_n;
  });
  g.c2 *= inv_n;
  require(params_finite(g), Errc::NonFiniteGradient, "gradient contains non-finite entries");

  out.diagnostics.objective = objective_sum * inv_n;
  out.diagnostics.mean_ratio = ratio_sum * inv_n;
  out.diagnostics.clip_fraction = static_cast<double>(clipped_count) * inv_n;
  return out;
}

void adam_step(std::vector<double>& flat, const std::vector<double>& grad, AdamState& state,
               double learning_rate) {
  require(flat.size() == grad.size(), Errc::DimensionMismatch, "adam_step: size mismatch");
  if (state.m.empty()) {
    state.m.assign(flat.size(), 0.0);
    state.v.assign(flat.size(), 0.0);
    state.step = 0;
  }
  require(state.m.size() == flat.size(), Errc::DimensionMismatch,
          "adam_step: optimizer state sized for different parameters");
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++state.step;
  double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < flat.size(); ++i) {
    state.m[i] = kBeta1 * state.m[i] + (1.0 - kBeta1) * grad[i];
    state.v[i] = kBeta2 * state.v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    flat[i] += learning_rate * (state.m[i] / bias1) / (std::sqrt(state.v[i] / bias2) + kEps);
  }
}

UpdateResult ppo_update(const PolicyParams& params, const std::vector<Episode>& batch,
                        const PpoConfig& cfg, AdamState* optimizer) {
  require(!batch.empty(), Errc::EmptyBatch, "ppo_update: empty batch");
  require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, Errc::ConfigError,
          "ppo_update: epsilon must lie in (0,1)");
  require(cfg.epochs_per_batch >= 1, Errc::ConfigError,
          "ppo_update: epochs_per_batch must be at least 1");
  AdamState local;
  AdamState& state = optimizer ? *optimizer : local;
  std::vector<double> flat = flatten(params);
  UpdateResult result;
  for (int epoch = 0; epoch < cfg.epochs_per_batch; ++epoch) {
    GradientResult g = compute_gradient(unflatten(flat), batch, cfg);
    if (epoch == 0) result.diagnostics = g.diagnostics;
    adam_step(flat, flatten(g.grad), state, cfg.learning_rate);
  }
  result.params = unflatten(flat);
  return result;
}

}  // namespace phishguard::fusion
