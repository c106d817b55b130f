#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phishguard/agents/types.hpp"
#include "phishguard/email/corpus.hpp"
#include "phishguard/fusion/types.hpp"

namespace phishguard::cli {

enum class FusionMode { Learned, Static };

struct CorpusSpec {
  std::filesystem::path path;
  email::CorpusFormat format = email::CorpusFormat::Auto;
  email::CorpusLabel label = email::CorpusLabel::Unlabeled;  /* Unlabeled keeps inference */
};

/* `path`, `path:format`, or `path:format:label`. */
CorpusSpec corpus_spec_from_string(const std::string& s);

struct RunConfig {
  agents::ChatBackendConfig backend;
  std::vector<CorpusSpec> corpora;
  fusion::PpoConfig ppo;
  int passes = 1;
  double threshold = 0.5;
  FusionMode fusion_mode = FusionMode::Learned;
  fusion::WeightVector static_w{{0.3, 0.4, 0.3}};
  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path output_dir = "phishguard-run";
};

/* `learned` or `static:w1,w2,w3`; static weights must lie on the simplex. */
void parse_fusion_flag(const std::string& flag, RunConfig& cfg);

/* Full snapshot for run_meta.json; the api key itself never appears, only
   whether one was set. */
std::string config_to_json(const RunConfig& cfg);

/* fnv-1a 64 over the fields that influence classifications: backend identity,
   corpora, ppo, passes, threshold, fusion mode, seed. Artifact locations,
   parallelism, and transport pacing are excluded so replays from a different
   directory still match their rows. */
std::string config_hash(const RunConfig& cfg);

std::string fnv1a_hex(std::string_view data);

}  // namespace phishguard::cli
