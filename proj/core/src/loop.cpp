#include "phishguard/adversarial/loop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "phishguard/errors.hpp"
#include "phishguard/num/rng.hpp"

namespace phishguard::adversarial {

namespace {

void require_inside(const std::filesystem::path& root, const std::filesystem::path& target) {
  auto nroot = root.lexically_normal();
  auto ntarget = target.lexically_normal();
  auto tit = ntarget.begin();
  for (auto rit = nroot.begin(); rit != nroot.end(); ++rit, ++tit) {
    if (tit == ntarget.end() || *tit != *rit) {
      raise(Errc::Precondition,
            "refusing to write outside the run directory: " + target.string());
    }
  }
}

std::vector<std::size_t> sample_subset(std::vector<std::size_t> indices, double fraction,
                                       num::RngStream& rng) {
  if (indices.empty()) return indices;
  auto want = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(indices.size())));
  want = std::min(want, indices.size());
  rng.shuffle(indices);
  indices.resize(want);
  return indices;
}

nlohmann::json variant_row(const AdversarialVariant& v) {
  nlohmann::json row;
  row["variant_id"] = v.variant_id;
  row["source_id"] = v.source_id;
  row["intended_label"] = std::string(email::to_string(v.intended_label));
  row["generator"] = std::string(to_string(v.generator));
  auto kinds = nlohmann::json::array();
  for (TransformKind k : v.transforms) kinds.push_back(std::string(to_string(k)));
  row["transforms"] = std::move(kinds);
  row["generated"] = true;
  row["text"] = v.text;
  return row;
}

nlohmann::json feedback_row(const FeedbackRecord& r) {
  nlohmann::json row;
  row["variant_id"] = r.variant_id;
  row["score"] = r.score;
  row["label"] = std::string(agents::to_string(r.label));
  row["evaded"] = r.evaded;
  return row;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::IoFailure, "cannot open " + path.string() + " for writing");
  for (const auto& row : rows) out << row.dump() << '\n';
  out.flush();
  require(out.good(), Errc::IoFailure, "failed writing " + path.string());
}

}  // namespace

LoopResult adversarial_loop(const std::vector<email::ParsedEmail>& corpus,
                            agents::ChatBackend& backend, const fusion::PolicyParams& params,
                            int rounds, const LoopConfig& cfg) {
  require(rounds >= 1, Errc::Precondition, "adversarial_loop: rounds must be at least 1");
  require(!corpus.empty(), Errc::EmptyCorpus, "adversarial_loop: corpus is empty");
  require(cfg.sample_fraction > 0.0 && cfg.sample_fraction <= 1.0, Errc::ConfigError,
          "adversarial_loop: sample_fraction must lie in (0,1]");
  require(cfg.admission_cap >= 0.0 && cfg.admission_cap <= 1.0, Errc::ConfigError,
          "adversarial_loop: admission_cap must lie in [0,1]");

  std::vector<std::size_t> phishing_idx;
  std::vector<std::size_t> legit_idx;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    require(corpus[i].label != email::CorpusLabel::Unlabeled, Errc::Precondition,
            "adversarial_loop: unlabeled email " + corpus[i].source_id);
    (corpus[i].label == email::CorpusLabel::Phishing ? phishing_idx : legit_idx).push_back(i);
  }

  LoopResult result;
  result.pool = corpus;
  result.params = params;
  num::RngStream base(cfg.seed);
  const auto cap =
      static_cast<std::size_t>(cfg.admission_cap * static_cast<double>(corpus.size()));

  std::string emphasis;
  for (int round = 1; round <= rounds; ++round) {
    num::RngStream round_stream = base.fork(static_cast<std::uint64_t>(round));
    std::vector<std::size_t> sampled = sample_subset(phishing_idx, cfg.sample_fraction, round_stream);
    std::vector<std::size_t> legit_sample = sample_subset(legit_idx, cfg.sample_fraction, round_stream);
    sampled.insert(sampled.end(), legit_sample.begin(), legit_sample.end());

    double intensity =
        std::min(1.0, cfg.base_intensity + cfg.intensity_step * static_cast<double>(round - 1));

    std::vector<AdversarialVariant> variants;
    variants.reserve(sampled.size());
    for (std::size_t idx : sampled) {
      const email::ParsedEmail& mail = corpus[idx];
      if (cfg.use_llm_generator) {
        AdversarialVariant v = generate_llm_variant(backend, mail, mail.label, emphasis);
        v.variant_id += "-r" + std::to_string(round);
        variants.push_back(std::move(v));
      } else {
        variants.push_back(
            rule_based_variant(mail, cfg.rule_kinds, round_stream.next_u64(), intensity));
      }
    }

    std::vector<email::ParsedEmail> parsed;
    parsed.reserve(variants.size());
    for (const AdversarialVariant& v : variants) parsed.push_back(parse_variant(v));

    std::vector<FeedbackRecord> feedback;
    feedback.reserve(variants.size());
    std::size_t evaded_count = 0;
    for (std::size_t i = 0; i < variants.size(); ++i) {
      fusion::DetectionResult det = fusion::infer(result.params, parsed[i], backend, cfg.threshold,
                                                  cfg.retrain.lexicon, cfg.retrain.reputation);
      FeedbackRecord rec;
      rec.variant_id = variants[i].variant_id;
      rec.score = det.score;
      rec.label = det.label;
      bool intended_phishing = variants[i].intended_label == email::CorpusLabel::Phishing;
      rec.evaded = (det.label == agents::Verdict::Phishing) != intended_phishing;
      if (rec.evaded) ++evaded_count;
      feedback.push_back(std::move(rec));
    }

    if (!cfg.run_dir.empty()) {
      std::filesystem::path round_dir = cfg.run_dir / ("round_" + std::to_string(round));
      require_inside(cfg.run_dir, round_dir);
      std::filesystem::create_directories(round_dir);
      std::vector<nlohmann::json> vrows;
      vrows.reserve(variants.size());
      for (const AdversarialVariant& v : variants) vrows.push_back(variant_row(v));
      std::vector<nlohmann::json> frows;
      frows.reserve(feedback.size());
      for (const FeedbackRecord& r : feedback) frows.push_back(feedback_row(r));
      std::filesystem::path vpath = round_dir / "variants.jsonl";
      std::filesystem::path fpath = round_dir / "feedback.jsonl";
      require_inside(cfg.run_dir, vpath);
      require_inside(cfg.run_dir, fpath);
      write_jsonl(vpath, vrows);
      write_jsonl(fpath, frows);
    }

    std::size_t admitted = 0;
    std::set<std::string> evaded_kinds;
    for (std::size_t i = 0; i < variants.size(); ++i) {
      if (!feedback[i].evaded) continue;
      for (TransformKind k : variants[i].transforms) evaded_kinds.insert(std::string(to_string(k)));
      if (admitted >= cap) continue;
      result.pool.push_back(parsed[i]);
      result.generated_ids.push_back(variants[i].variant_id);
      ++admitted;
    }

    if (evaded_count > 0) {
      if (evaded_kinds.empty()) {
        emphasis = "Emphasis: earlier variants evaded detection; push every strategy further.";
      } else {
        emphasis = "Emphasis: these strategies evaded detection last round:";
        for (const std::string& name : evaded_kinds) emphasis += " " + name;
        emphasis += ".";
      }
    } else {
      emphasis.clear();
    }

    if (admitted > 0) {  /* pool unchanged otherwise, nothing new to fit */
      fusion::TrainOptions retrain = cfg.retrain;
      retrain.ppo.seed = base.fork(5000 + static_cast<std::uint64_t>(round)).next_u64();
      retrain.warm_start = cfg.warm_start_retrain ? &result.params : nullptr;
      fusion::TrainResult trained = fusion::train(result.pool, backend, retrain);
      result.params = std::move(trained.params);
    }

    RoundReport report;
    report.round = round;
    report.variants = variants.size();
    report.evaded = evaded_count;
    report.evasion_rate = variants.empty()
                              ? 0.0
                              : static_cast<double>(evaded_count) / static_cast<double>(variants.size());
    report.admitted = admitted;
    report.pool_size = result.pool.size();
    result.rounds.push_back(report);
  }
  return result;
}

}  // namespace phishguard::adversarial
