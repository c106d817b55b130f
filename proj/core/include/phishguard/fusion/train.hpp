#pragma once

#include <filesystem>
#include <functional>

#include "phishguard/agents/backend.hpp"
#include "phishguard/email/parser.hpp"
#include "phishguard/fusion/checkpoint.hpp"
#include "phishguard/fusion/ppo.hpp"

namespace phishguard::fusion {

struct TrainOptions {
  PpoConfig ppo;
  int passes = 1;
  double threshold = 0.5;
  std::filesystem::path checkpoint_path;  /* empty disables checkpointing */
  int checkpoint_every = 25;              /* batches */
  std::uint64_t batch_offset = 0;         /* resumed runs continue the saved counter */
  const email::Lexicon* lexicon = nullptr;
  const email::ReputationTable* reputation = nullptr;
  const PolicyParams* warm_start = nullptr;  /* continue from these instead of a fresh init */
};

struct BatchStats {
  std::size_t batch_index = 0;
  std::size_t size = 0;
  double mean_reward = 0.0;
  PpoDiagnostics diagnostics;
};

struct TrainingLog {
  std::vector<BatchStats> batches;
};

struct TrainResult {
  PolicyParams params;
  TrainingLog log;
};

/* Builds the fusion input for one email: runs the three detection agents,
   extracts features, maps verdicts to probabilities. */
FusionInput gather_fusion_input(agents::ChatBackend& backend, const email::ParsedEmail& mail,
                                std::array<agents::AgentReport, kNumAgents>* reports_out = nullptr,
                                const email::Lexicon* lexicon = nullptr,
                                const email::ReputationTable* reputation = nullptr);

/* Shuffled minibatch PPO over a fully labeled corpus. Throws EmptyCorpus,
   Precondition on unlabeled emails; propagates backend errors. */
TrainResult train(const std::vector<email::ParsedEmail>& corpus, agents::ChatBackend& backend,
                  const TrainOptions& opts);

/* Deterministic detection with policy-mean weights. */
DetectionResult infer(const PolicyParams& params, const email::ParsedEmail& mail,
                      agents::ChatBackend& backend, double threshold = 0.5,
                      const email::Lexicon* lexicon = nullptr,
                      const email::ReputationTable* reputation = nullptr);

/* Fixed-weight mode; the policy network is bypassed entirely. */
DetectionResult infer_static(const WeightVector& weights, const email::ParsedEmail& mail,
                             agents::ChatBackend& backend, double threshold = 0.5,
                             const email::Lexicon* lexicon = nullptr,
                             const email::ReputationTable* reputation = nullptr);

WeightVector static_weights();  /* (0.3, 0.4, 0.3) */

}  // namespace phishguard::fusion
