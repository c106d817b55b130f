#include "cli/run_config.hpp"

#include <json.hpp>

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::cli {

CorpusSpec corpus_spec_from_string(const std::string& s) {
  require(!text::trim(s).empty(), Errc::ConfigError, "empty corpus spec");
  CorpusSpec spec;
  std::vector<std::string> parts = text::split(s, ':');
  spec.path = parts[0];
  if (parts.size() > 1) spec.format = email::corpus_format_from_string(parts[1]);
  if (parts.size() > 2) spec.label = email::corpus_label_from_string(parts[2]);
  require(parts.size() <= 3, Errc::ConfigError, "corpus spec '" + s + "' has too many fields");
  return spec;
}

void parse_fusion_flag(const std::string& flag, RunConfig& cfg) {
  std::string v = text::to_lower(text::trim(flag));
  if (v == "learned") {
    cfg.fusion_mode = FusionMode::Learned;
    return;
  }
  if (v.rfind("static:", 0) == 0) {
    std::vector<std::string> parts = text::split(v.substr(7), ',');
    require(parts.size() == 3, Errc::ConfigError,
            "static fusion needs three comma-separated weights");
    fusion::WeightVector w;
    for (std::size_t i = 0; i < 3; ++i) {
      try {
        w[i] = std::stod(parts[i]);
      } catch (const std::exception&) {
        raise(Errc::ConfigError, "bad fusion weight '" + parts[i] + "'");
      }
    }
    require(fusion::on_simplex(w, 1e-6), Errc::ConfigError,
            "static weights must be non-negative and sum to 1");
    cfg.fusion_mode = FusionMode::Static;
    cfg.static_w = w;
    return;
  }
  raise(Errc::ConfigError, "unknown fusion mode '" + flag + "' (learned | static:w1,w2,w3)");
}

namespace {

const char* format_name(email::CorpusFormat f) {
  switch (f) {
    case email::CorpusFormat::Auto: return "auto";
    case email::CorpusFormat::EmlDir: return "eml";
    case email::CorpusFormat::Mbox: return "mbox";
    case email::CorpusFormat::Csv: return "csv";
  }
  return "auto";
}

nlohmann::json corpora_json(const RunConfig& cfg) {
  auto arr = nlohmann::json::array();
  for (const CorpusSpec& spec : cfg.corpora) {
    arr.push_back({{"path", spec.path.generic_string()},
                   {"format", format_name(spec.format)},
                   {"label", std::string(email::to_string(spec.label))}});
  }
  return arr;
}

nlohmann::json hashed_fields(const RunConfig& cfg) {
  nlohmann::json j;
  j["backend"] = {{"kind", cfg.backend.kind == agents::BackendKind::Mock ? "mock" : "http"},
                  {"base_url", cfg.backend.base_url},
                  {"model", cfg.backend.model_name}};
  j["corpora"] = corpora_json(cfg);
  j["ppo"] = {{"epsilon", cfg.ppo.epsilon},
              {"learning_rate", cfg.ppo.learning_rate},
              {"epochs_per_batch", cfg.ppo.epochs_per_batch},
              {"batch_size", cfg.ppo.batch_size},
              {"seed", cfg.ppo.seed}};
  j["passes"] = cfg.passes;
  j["threshold"] = cfg.threshold;
  if (cfg.fusion_mode == FusionMode::Learned) {
    j["fusion"] = {{"mode", "learned"}};
  } else {
    j["fusion"] = {{"mode", "static"},
                   {"weights", {cfg.static_w[0], cfg.static_w[1], cfg.static_w[2]}}};
  }
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) {
  nlohmann::json j = hashed_fields(cfg);
  j["backend"]["timeout_ms"] = cfg.backend.timeout.count();
  j["backend"]["max_retries"] = cfg.backend.max_retries;
  j["backend"]["rate_limit_ms"] = cfg.backend.rate_limit_interval.count();
  j["backend"]["api_key_set"] = !cfg.backend.api_key.empty();
  j["jobs"] = cfg.jobs;
  j["output_dir"] = cfg.output_dir.generic_string();
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) { return fnv1a_hex(hashed_fields(cfg).dump()); }

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace phishguard::cli
