#include "phishguard/fusion/train.hpp"

#include <numeric>

#include "phishguard/agents/runner.hpp"
#include "phishguard/errors.hpp"

namespace phishguard::fusion {

FusionInput gather_fusion_input(agents::ChatBackend& backend, const email::ParsedEmail& mail,
                                std::array<agents::AgentReport, kNumAgents>* reports_out,
                                const email::Lexicon* lexicon,
                                const email::ReputationTable* reputation) {
  auto reports = agents::run_detection_agents(backend, mail);
  FusionInput input;
  input.features = email::extract_features(mail, lexicon ? *lexicon : email::Lexicon::builtin(),
                                           reputation ? *reputation : email::ReputationTable());
  for (int i = 0; i < kNumAgents; ++i) {
    input.confidences[i] = reports[i].verdict.confidence;
    input.probs[i] = agent_prob(reports[i].verdict);
  }
  if (reports_out) *reports_out = std::move(reports);
  return input;
}

TrainResult train(const std::vector<email::ParsedEmail>& corpus, agents::ChatBackend& backend,
                  const TrainOptions& opts) {
  require(!corpus.empty(), Errc::EmptyCorpus, "train: corpus is empty");
  for (const email::ParsedEmail& mail : corpus) {
    require(mail.label != email::CorpusLabel::Unlabeled, Errc::Precondition,
            "train: unlabeled email " + mail.source_id);
  }
  require(opts.ppo.batch_size >= 1, Errc::ConfigError, "train: batch_size must be positive");
  require(opts.passes >= 1, Errc::ConfigError, "train: passes must be positive");
  require(opts.checkpoint_path.empty() || opts.checkpoint_every >= 1, Errc::ConfigError,
          "train: checkpoint_every must be positive");

  num::RngStream base(opts.ppo.seed);
  num::RngStream init_stream = base.fork(0);
  num::RngStream shuffle_stream = base.fork(1);
  num::RngStream sample_stream = base.fork(2);

  PolicyParams params = opts.warm_start ? *opts.warm_start : init_params(init_stream.next_u64());
  AdamState adam;
  TrainingLog log;
  std::uint64_t batches_seen = opts.batch_offset;

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int pass = 0; pass < opts.passes; ++pass) {
    shuffle_stream.shuffle(order);
    std::size_t pos = 0;
    while (pos < order.size()) {
      std::size_t take =
          std::min<std::size_t>(static_cast<std::size_t>(opts.ppo.batch_size), order.size() - pos);
      std::vector<Episode> batch;
      batch.reserve(take);
      double reward_sum = 0.0;
      for (std::size_t k = 0; k < take; ++k) {
        const email::ParsedEmail& mail = corpus[order[pos + k]];
        Episode ep;
        ep.input = gather_fusion_input(backend, mail, nullptr, opts.lexicon, opts.reputation);
        auto x = build_policy_input(ep.input);
        PolicySample sample = policy_sample(params, x, sample_stream);
        ep.sampled_w = sample.w;
        ep.log_prob_old = sample.log_prob;
        double y = fuse(ep.sampled_w, ep.input.probs);
        bool predicted_phishing = classify(y, opts.threshold) == agents::Verdict::Phishing;
        bool is_phishing = mail.label == email::CorpusLabel::Phishing;
        ep.reward = predicted_phishing == is_phishing ? 1.0 : 0.0;
        ep.advantage = ep.reward - value_forward(params, x).value;
        reward_sum += ep.reward;
        batch.push_back(std::move(ep));
      }
      pos += take;
      normalize_advantages(batch);
      UpdateResult update = ppo_update(params, batch, opts.ppo, &adam);
      params = std::move(update.params);
      ++batches_seen;
      log.batches.push_back(
          {batches_seen, take, reward_sum / static_cast<double>(take), update.diagnostics});
      if (!opts.checkpoint_path.empty() &&
          batches_seen % static_cast<std::uint64_t>(opts.checkpoint_every) == 0) {
        save_checkpoint(opts.checkpoint_path,
                        {1, opts.ppo, params, opts.ppo.seed, batches_seen});
      }
    }
  }
  if (!opts.checkpoint_path.empty()) {
    save_checkpoint(opts.checkpoint_path, {1, opts.ppo, params, opts.ppo.seed, batches_seen});
  }
  return {std::move(params), std::move(log)};
}

namespace {

DetectionResult detect_with_weights(const WeightVector& weights, const FusionInput& input,
                                    std::array<agents::AgentReport, kNumAgents>&& reports,
                                    double threshold) {
  DetectionResult result;
  result.weights = weights;
  result.reports = std::move(reports);
  result.score = fuse(weights, input.probs);
  result.label = classify(result.score, threshold);
  return result;
}

}  // namespace

DetectionResult infer(const PolicyParams& params, const email::ParsedEmail& mail,
                      agents::ChatBackend& backend, double threshold,
                      const email::Lexicon* lexicon, const email::ReputationTable* reputation) {
  std::array<agents::AgentReport, kNumAgents> reports;
  FusionInput input = gather_fusion_input(backend, mail, &reports, lexicon, reputation);
  WeightVector weights = policy_mean(params, build_policy_input(input));
  return detect_with_weights(weights, input, std::move(reports), threshold);
}

DetectionResult infer_static(const WeightVector& weights, const email::ParsedEmail& mail,
                             agents::ChatBackend& backend, double threshold,
                             const email::Lexicon* lexicon,
                             const email::ReputationTable* reputation) {
  require(on_simplex(weights, 1e-6), Errc::Precondition,
          "infer_static: weights must lie on the simplex");
  std::array<agents::AgentReport, kNumAgents> reports;
  FusionInput input = gather_fusion_input(backend, mail, &reports, lexicon, reputation);
  return detect_with_weights(weights, input, std::move(reports), threshold);
}

WeightVector static_weights() {
  WeightVector w;
  w.v = {0.3, 0.4, 0.3};
  return w;
}

}  // namespace phishguard::fusion
