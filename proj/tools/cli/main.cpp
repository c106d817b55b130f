#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "phishguard/errors.hpp"

int main(int argc, char** argv) {
  using namespace phishguard;

  CLI::App app{"multi-agent phishing email detector"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::string backend_name = "mock";
  std::string fusion_flag;
  std::vector<std::string> corpus_flags;
  std::string output_dir = cfg.output_dir.string();
  long long timeout_ms = cfg.backend.timeout.count();

  app.add_option("--backend", backend_name, "chat backend: mock | http")
      ->capture_default_str();
  app.add_option("--model", cfg.backend.model_name, "model name for the http backend")
      ->envname("PHISHGUARD_MODEL");
  app.add_option("--base-url", cfg.backend.base_url, "chat completions endpoint")
      ->envname("PHISHGUARD_BASE_URL");
  app.add_option("--api-key", cfg.backend.api_key, "bearer token for the http backend")
      ->envname("PHISHGUARD_API_KEY");
  app.add_option("--timeout-ms", timeout_ms, "per-request timeout");
  app.add_option("--threshold", cfg.threshold, "phishing decision threshold")
      ->capture_default_str();
  app.add_option("--fusion", fusion_flag, "learned | static:w1,w2,w3");
  app.add_option("--seed", cfg.seed, "seed for every stochastic component")
      ->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "parallel email workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--output-dir", output_dir, "directory for run artifacts")
      ->capture_default_str();
  app.add_option("--corpus", corpus_flags, "labeled corpus as path[:format[:label]]");

  cli::ClassifyOptions classify_opts;
  std::vector<std::string> classify_inputs;
  std::string explain_flag;
  bool expert_mode = false;
  std::string classify_checkpoint;
  CLI::App* classify = app.add_subcommand("classify", "detect phishing in emails");
  classify->add_option("inputs", classify_inputs, "emails: .eml/.mbox/.csv files or directories");
  classify->add_option("--explain", explain_flag, "attach a simplified rationale: plain | expert");
  classify->add_flag("--expert-mode", expert_mode, "expert-level explanations (implies --explain)");
  classify->add_option("--checkpoint", classify_checkpoint, "trained fusion policy to load");

  cli::TrainCmdOptions train_opts;
  std::string resume_path;
  CLI::App* train = app.add_subcommand("train", "fit the fusion policy on labeled corpora");
  train->add_option("--resume", resume_path, "checkpoint to continue from");
  train->add_option("--passes", cfg.passes, "passes over the corpus")->capture_default_str();
  train->add_option("--batch-size", cfg.ppo.batch_size, "episodes per update")
      ->capture_default_str();
  train->add_option("--learning-rate", cfg.ppo.learning_rate, "adam step size")
      ->capture_default_str();

  cli::EvalOptions eval_opts;
  std::string predictions_path;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions and compare systems");
  eval_cmd->add_option("--predictions", predictions_path,
                       "csv with label, optional group, one column per system; omit to run live");

  cli::AdversarialOptions adv_opts;
  std::string adv_checkpoint;
  CLI::App* adversarial = app.add_subcommand("adversarial", "harden the detector with variants");
  adversarial->add_option("--rounds", adv_opts.rounds, "generate/retrain cycles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  adversarial->add_option("--checkpoint", adv_checkpoint, "starting detector policy");
  adversarial->add_flag("--llm-variants", adv_opts.llm_variants,
                        "rewrite with the chat backend instead of rule transforms");

  cli::QualityOptions quality_opts;
  std::string explanations_path;
  std::string references_path;
  CLI::App* quality = app.add_subcommand("quality", "score explanation text quality");
  quality->add_option("--explanations", explanations_path, "candidate texts, one per line")
      ->required();
  quality->add_option("--references", references_path, "reference texts, one per line")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? cli::kExitClean : cli::kExitError;
  }

  try {
    if (backend_name == "mock") {
      cfg.backend.kind = agents::BackendKind::Mock;
    } else if (backend_name == "http") {
      cfg.backend.kind = agents::BackendKind::Http;
    } else {
      raise(Errc::ConfigError, "unknown backend '" + backend_name + "' (mock | http)");
    }
    cfg.backend.timeout = std::chrono::milliseconds(timeout_ms);
    cfg.output_dir = output_dir;
    cfg.ppo.seed = cfg.seed;
    if (!fusion_flag.empty()) cli::parse_fusion_flag(fusion_flag, cfg);
    for (const std::string& flag : corpus_flags) {
      cfg.corpora.push_back(cli::corpus_spec_from_string(flag));
    }

    for (const std::string& input : classify_inputs) {
      classify_opts.inputs.push_back(cli::corpus_spec_from_string(input));
    }
    if (expert_mode) {
      classify_opts.explain = agents::ExplainMode::Expert;
    } else if (!explain_flag.empty()) {
      if (explain_flag == "plain") {
        classify_opts.explain = agents::ExplainMode::Plain;
      } else if (explain_flag == "expert") {
        classify_opts.explain = agents::ExplainMode::Expert;
      } else {
        raise(Errc::ConfigError, "unknown explain mode '" + explain_flag + "' (plain | expert)");
      }
    }
    classify_opts.checkpoint = classify_checkpoint;
    train_opts.resume = resume_path;
    eval_opts.predictions = predictions_path;
    adv_opts.checkpoint = adv_checkpoint;
    quality_opts.explanations = explanations_path;
    quality_opts.references = references_path;
  } catch (const Error& e) {
    nlohmann::json record;
    record["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
    std::cerr << record.dump() << '\n';
    return cli::kExitError;
  }

  if (classify->parsed()) return cli::cmd_classify(cfg, classify_opts, std::cout, std::cerr);
  if (train->parsed()) return cli::cmd_train(cfg, train_opts, std::cout, std::cerr);
  if (eval_cmd->parsed()) return cli::cmd_eval(cfg, eval_opts, std::cout, std::cerr);
  if (adversarial->parsed()) return cli::cmd_adversarial(cfg, adv_opts, std::cout, std::cerr);
  if (quality->parsed()) return cli::cmd_quality(cfg, quality_opts, std::cout, std::cerr);
  return cli::kExitError;
}
