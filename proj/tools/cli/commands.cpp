#include "cli/commands.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <thread>

#include <json.hpp>

#include "phishguard/adversarial/loop.hpp"
#include "phishguard/email/parser.hpp"
#include "phishguard/errors.hpp"
#include "phishguard/eval/metrics.hpp"
#include "phishguard/explain/quality.hpp"
#include "phishguard/explain/simplify.hpp"
#include "phishguard/fusion/train.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::cli {

namespace {

using nlohmann::json;

int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    json record;
    record["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
    err << record.dump() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    json record;
    record["error"] = {{"code", "Unexpected"}, {"message", e.what()}};
    err << record.dump() << '\n';
    return kExitError;
  }
}

/* Indexed slots keep outputs in input order regardless of scheduling; the
   lowest-index exception wins so reruns fail the same way. */
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  int workers = std::max(1, jobs);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(n);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }
}

std::vector<email::ParsedEmail> load_and_parse(const std::vector<CorpusSpec>& specs,
                                               std::vector<std::string>* groups_out = nullptr) {
  require(!specs.empty(), Errc::MissingInput, "no input corpora given");
  std::vector<email::ParsedEmail> parsed;
  for (const CorpusSpec& spec : specs) {
    email::LoadOptions options;
    if (spec.label != email::CorpusLabel::Unlabeled) options.label_override = spec.label;
    std::vector<email::RawEmail> raws = email::load_corpus(spec.path, spec.format, options);
    std::string group = spec.path.stem().string();
    for (email::RawEmail& raw : raws) {
      parsed.push_back(email::parse_eml(raw));
      if (groups_out) groups_out->push_back(group);
    }
  }
  return parsed;
}

std::ofstream open_artifact(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::IoFailure, "cannot open " + path.string() + " for writing");
  return out;
}

void close_artifact(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  require(out.good(), Errc::IoFailure, "failed writing " + path.string());
}

class RunMeta {
public:
  RunMeta(const RunConfig& cfg, const char* command)
      : cfg_(cfg), started_(std::chrono::steady_clock::now()) {
    meta_["command"] = command;
    meta_["config"] = json::parse(config_to_json(cfg));
    meta_["config_hash"] = config_hash(cfg);
    auto wall =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    meta_["started_at_ms"] = wall;
    meta_["run_id"] = config_hash(cfg) + "-" + std::to_string(wall);
  }

  void add(const std::string& key, json value) { meta_[key] = std::move(value); }

  /* Timing lives only here; the JSONL rows stay byte-reproducible. */
  void write() {
    meta_["duration_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              started_)
            .count();
    std::filesystem::path path = cfg_.output_dir / "run_meta.json";
    std::ofstream out = open_artifact(path);
    out << meta_.dump(2) << '\n';
    close_artifact(out, path);
  }

private:
  const RunConfig& cfg_;
  std::chrono::steady_clock::time_point started_;
  json meta_;
};

const char* explain_mode_name(agents::ExplainMode mode) {
  return mode == agents::ExplainMode::Plain ? "plain" : "expert";
}

fusion::PolicyParams resolve_params(const RunConfig& cfg, const std::filesystem::path& checkpoint) {
  if (!checkpoint.empty()) return fusion::load_checkpoint(checkpoint).params;
  return fusion::init_params(cfg.seed);
}

agents::Verdict verdict_from_string(const std::string& s) {
  std::string v = text::to_lower(text::trim(s));
  if (v == "phishing" || v == "phish" || v == "1") return agents::Verdict::Phishing;
  if (v == "legitimate" || v == "legit" || v == "0") return agents::Verdict::Legitimate;
  raise(Errc::FormatMismatch, "unknown verdict '" + s + "'");
}

json metric_json(const eval::MetricReport& m) {
  auto cell = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["recall"] = cell(m.recall);
  j["precision"] = cell(m.precision);
  j["accuracy"] = cell(m.accuracy);
  j["f1"] = cell(m.f1);
  j["tnr"] = cell(m.tnr);
  j["fpr"] = cell(m.fpr);
  j["fnr"] = cell(m.fnr);
  return j;
}

json counts_json(const eval::ConfusionCounts& c) {
  return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

void write_evaluation(const RunConfig& cfg, const eval::RunEvaluation& ev, std::ostream& out) {
  std::string hash = config_hash(cfg);
  std::filesystem::path rows_path = cfg.output_dir / "eval.jsonl";
  std::ofstream rows = open_artifact(rows_path);
  {
    json row;
    row["config_hash"] = hash;
    row["kind"] = "pooled";
    row["counts"] = counts_json(ev.pooled_counts);
    row["metrics"] = metric_json(ev.pooled);
    rows << row.dump() << '\n';
  }
  for (const eval::GroupReport& g : ev.groups) {
    json row;
    row["config_hash"] = hash;
    row["kind"] = "group";
    row["group"] = g.group;
    row["counts"] = counts_json(g.counts);
    row["metrics"] = metric_json(g.metrics);
    rows << row.dump() << '\n';
  }
  for (const eval::SystemComparison& c : ev.comparisons) {
    json row;
    row["config_hash"] = hash;
    row["kind"] = "comparison";
    row["system_a"] = c.system_a;
    row["system_b"] = c.system_b;
    row["n10"] = c.outcomes.n10;
    row["n01"] = c.outcomes.n01;
    row["n11"] = c.outcomes.n11;
    row["n00"] = c.outcomes.n00;
    row["method"] = std::string(eval::to_string(c.test.method));
    row["raw_p"] = c.test.raw_p;
    row["adj_p"] = c.test.adj_p ? json(*c.test.adj_p) : json(nullptr);
    rows << row.dump() << '\n';
  }
  close_artifact(rows, rows_path);

  std::string table = eval::render_metrics_table(ev);
  std::filesystem::path table_path = cfg.output_dir / "report.txt";
  std::ofstream report = open_artifact(table_path);
  report << table;
  close_artifact(report, table_path);
  out << table;
}

}  // namespace

int cmd_classify(const RunConfig& cfg, const ClassifyOptions& opts, std::ostream& out,
                 std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    RunMeta meta(cfg, "classify");
    const std::vector<CorpusSpec>& specs = opts.inputs.empty() ? cfg.corpora : opts.inputs;
    std::vector<email::ParsedEmail> emails = load_and_parse(specs);
    std::shared_ptr<agents::ChatBackend> backend = agents::make_backend(cfg.backend);

    fusion::PolicyParams params;
    if (cfg.fusion_mode == FusionMode::Learned) params = resolve_params(cfg, opts.checkpoint);

    struct Row {
      fusion::DetectionResult det;
      std::string explanation;
    };
    std::vector<Row> rows(emails.size());
    parallel_for(emails.size(), cfg.jobs, [&](std::size_t i) {
      Row& row = rows[i];
      if (cfg.fusion_mode == FusionMode::Learned) {
        row.det = fusion::infer(params, emails[i], *backend, cfg.threshold);
      } else {
        row.det = fusion::infer_static(cfg.static_w, emails[i], *backend, cfg.threshold);
      }
      if (opts.explain) {
        std::vector<agents::AgentReport> reports(row.det.reports.begin(), row.det.reports.end());
        row.explanation = explain::simplify(*backend, reports, *opts.explain).text;
      }
    });

    std::filesystem::create_directories(cfg.output_dir);
    std::string hash = config_hash(cfg);
    std::filesystem::path results_path = cfg.output_dir / "results.jsonl";
    std::ofstream results = open_artifact(results_path);
    std::size_t phishing = 0;
    for (std::size_t i = 0; i < emails.size(); ++i) {
      const fusion::DetectionResult& det = rows[i].det;
      if (det.label == agents::Verdict::Phishing) ++phishing;
      json row;
      row["config_hash"] = hash;
      row["source_id"] = emails[i].source_id;
      row["label"] = std::string(agents::to_string(det.label));
      row["score"] = det.score;
      row["weights"] = {det.weights[0], det.weights[1], det.weights[2]};
      auto rationales = json::array();
      for (const agents::AgentReport& report : det.reports) {
        rationales.push_back({{"agent", std::string(agents::to_string(report.role))},
                              {"verdict", std::string(agents::to_string(report.verdict.verdict))},
                              {"confidence", report.verdict.confidence},
                              {"reasons", report.verdict.reasons}});
      }
      row["rationales"] = std::move(rationales);
      if (opts.explain) {
        row["explanation"] = rows[i].explanation;
        row["explain_mode"] = explain_mode_name(*opts.explain);
      }
      results << row.dump() << '\n';
    }
    close_artifact(results, results_path);

    meta.add("emails", emails.size());
    meta.add("phishing", phishing);
    meta.add("results", results_path.generic_string());
    meta.write();

    for (std::size_t i = 0; i < emails.size(); ++i) {
      out << emails[i].source_id << '\t' << agents::to_string(rows[i].det.label) << '\t'
          << std::fixed << std::setprecision(4) << rows[i].det.score << '\n';
    }
    out << emails.size() << " emails, " << phishing << " phishing -> " << results_path.string()
        << '\n';
    return phishing > 0 ? kExitPhishing : kExitClean;
  });
}

int cmd_train(const RunConfig& cfg, const TrainCmdOptions& opts, std::ostream& out,
              std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    require(cfg.fusion_mode == FusionMode::Learned, Errc::ConfigError,
            "static fusion has no trainable parameters");
    RunMeta meta(cfg, "train");
    std::vector<email::ParsedEmail> corpus = load_and_parse(cfg.corpora);
    std::shared_ptr<agents::ChatBackend> backend = agents::make_backend(cfg.backend);

    std::filesystem::create_directories(cfg.output_dir);
    fusion::TrainOptions train_opts;
    train_opts.ppo = cfg.ppo;
    train_opts.ppo.seed = cfg.seed;
    train_opts.passes = cfg.passes;
    train_opts.threshold = cfg.threshold;
    train_opts.checkpoint_path = cfg.output_dir / "checkpoint.json";

    fusion::PolicyParams resumed;
    if (!opts.resume.empty()) {
      fusion::Checkpoint ckpt = fusion::load_checkpoint(opts.resume);
      resumed = std::move(ckpt.params);
      train_opts.warm_start = &resumed;
      train_opts.batch_offset = ckpt.batches_seen;
    }

    fusion::TrainResult result = fusion::train(corpus, *backend, train_opts);

    std::string hash = config_hash(cfg);
    std::filesystem::path log_path = cfg.output_dir / "training_log.jsonl";
    std::ofstream log = open_artifact(log_path);
    for (const fusion::BatchStats& batch : result.log.batches) {
      json row;
      row["config_hash"] = hash;
      row["batch"] = batch.batch_index;
      row["size"] = batch.size;
      row["mean_reward"] = batch.mean_reward;
      row["objective"] = batch.diagnostics.objective;
      row["mean_ratio"] = batch.diagnostics.mean_ratio;
      row["clip_fraction"] = batch.diagnostics.clip_fraction;
      log << row.dump() << '\n';
    }
    close_artifact(log, log_path);

    meta.add("emails", corpus.size());
    meta.add("batches", result.log.batches.size());
    meta.add("checkpoint", train_opts.checkpoint_path.generic_string());
    if (!opts.resume.empty()) meta.add("resumed_from", opts.resume.generic_string());
    meta.write();

    double last_reward =
        result.log.batches.empty() ? 0.0 : result.log.batches.back().mean_reward;
    out << "trained " << result.log.batches.size() << " batches over " << corpus.size()
        << " emails (last mean reward " << std::fixed << std::setprecision(3) << last_reward
        << ")\ncheckpoint: " << train_opts.checkpoint_path.string() << '\n';
    return kExitClean;
  });
}

namespace {

eval::RunEvaluation evaluate_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto rows = email::parse_csv(data);
  require(rows.size() >= 2, Errc::FormatMismatch, path.string() + " needs a header and rows");

  const auto& header = rows[0];
  std::optional<std::size_t> label_col;
  std::optional<std::size_t> group_col;
  std::vector<std::size_t> system_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = text::to_lower(text::trim(header[i]));
    if (name == "label") {
      label_col = i;
    } else if (name == "group") {
      group_col = i;
    } else if (!name.empty()) {
      system_cols.push_back(i);
    }
  }
  require(label_col.has_value(), Errc::FormatMismatch, path.string() + " has no label column");
  require(!system_cols.empty(), Errc::FormatMismatch, path.string() + " has no system columns");

  std::vector<email::CorpusLabel> labels;
  std::vector<std::string> groups;
  std::vector<eval::SystemRun> systems;
  for (std::size_t col : system_cols) systems.push_back({text::trim(header[col]), {}});

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    auto cell = [&](std::size_t col) -> std::string {
      require(col < row.size(), Errc::FormatMismatch,
              path.string() + " row " + std::to_string(r) + " is short");
      return text::trim(row[col]);
    };
    labels.push_back(email::corpus_label_from_string(cell(*label_col)));
    groups.push_back(group_col ? cell(*group_col) : "all");
    for (std::size_t s = 0; s < system_cols.size(); ++s) {
      systems[s].predictions.push_back(verdict_from_string(cell(system_cols[s])));
    }
  }
  return eval::evaluate_run(systems, labels, groups);
}

eval::RunEvaluation evaluate_live(const RunConfig& cfg) {
  std::vector<std::string> groups;
  std::vector<email::ParsedEmail> emails = load_and_parse(cfg.corpora, &groups);
  std::shared_ptr<agents::ChatBackend> backend = agents::make_backend(cfg.backend);

  std::vector<email::CorpusLabel> labels;
  labels.reserve(emails.size());
  for (const email::ParsedEmail& mail : emails) labels.push_back(mail.label);

  fusion::PolicyParams params;
  if (cfg.fusion_mode == FusionMode::Learned) params = resolve_params(cfg, {});

  std::vector<agents::Verdict> primary(emails.size(), agents::Verdict::Legitimate);
  std::vector<agents::Verdict> baseline(emails.size(), agents::Verdict::Legitimate);
  bool with_baseline = cfg.fusion_mode == FusionMode::Learned;
  parallel_for(emails.size(), cfg.jobs, [&](std::size_t i) {
    if (cfg.fusion_mode == FusionMode::Learned) {
      primary[i] = fusion::infer(params, emails[i], *backend, cfg.threshold).label;
      baseline[i] =
          fusion::infer_static(fusion::static_weights(), emails[i], *backend, cfg.threshold).label;
    } else {
      primary[i] =
          fusion::infer_static(cfg.static_w, emails[i], *backend, cfg.threshold).label;
    }
  });

  std::vector<eval::SystemRun> systems;
  systems.push_back({cfg.fusion_mode == FusionMode::Learned ? "learned" : "static",
                     std::move(primary)});
  if (with_baseline) systems.push_back({"static", std::move(baseline)});
  return eval::evaluate_run(systems, labels, groups);
}

}  // namespace

int cmd_eval(const RunConfig& cfg, const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    RunMeta meta(cfg, "eval");
    eval::RunEvaluation ev =
        opts.predictions.empty() ? evaluate_live(cfg) : evaluate_from_csv(opts.predictions);
    std::filesystem::create_directories(cfg.output_dir);
    write_evaluation(cfg, ev, out);
    meta.add("rows", ev.pooled_counts.total());
    meta.add("groups", ev.groups.size());
    meta.add("comparisons", ev.comparisons.size());
    if (!opts.predictions.empty()) meta.add("predictions", opts.predictions.generic_string());
    meta.write();
    return kExitClean;
  });
}

int cmd_adversarial(const RunConfig& cfg, const AdversarialOptions& opts, std::ostream& out,
                    std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    RunMeta meta(cfg, "adversarial");
    std::vector<email::ParsedEmail> corpus = load_and_parse(cfg.corpora);
    std::shared_ptr<agents::ChatBackend> backend = agents::make_backend(cfg.backend);
    std::filesystem::create_directories(cfg.output_dir);

    fusion::TrainOptions retrain;
    retrain.ppo = cfg.ppo;
    retrain.ppo.seed = cfg.seed;
    retrain.passes = cfg.passes;
    retrain.threshold = cfg.threshold;

    fusion::PolicyParams params;
    if (!opts.checkpoint.empty()) {
      params = fusion::load_checkpoint(opts.checkpoint).params;
    } else {
      params = fusion::train(corpus, *backend, retrain).params;
    }

    adversarial::LoopConfig loop_cfg;
    loop_cfg.seed = cfg.seed;
    loop_cfg.threshold = cfg.threshold;
    loop_cfg.use_llm_generator = opts.llm_variants;
    loop_cfg.retrain = retrain;
    loop_cfg.run_dir = cfg.output_dir;
    adversarial::LoopResult result =
        adversarial::adversarial_loop(corpus, *backend, params, opts.rounds, loop_cfg);

    std::string hash = config_hash(cfg);
    std::filesystem::path rounds_path = cfg.output_dir / "rounds.jsonl";
    std::ofstream rounds = open_artifact(rounds_path);
    for (const adversarial::RoundReport& r : result.rounds) {
      json row;
      row["config_hash"] = hash;
      row["round"] = r.round;
      row["variants"] = r.variants;
      row["evaded"] = r.evaded;
      row["evasion_rate"] = r.evasion_rate;
      row["admitted"] = r.admitted;
      row["pool_size"] = r.pool_size;
      rounds << row.dump() << '\n';
    }
    close_artifact(rounds, rounds_path);

    std::filesystem::path ckpt_path = cfg.output_dir / "checkpoint.json";
    fusion::save_checkpoint(ckpt_path, {1, retrain.ppo, result.params, cfg.seed, 0});

    meta.add("rounds", result.rounds.size());
    meta.add("pool_size", result.pool.size());
    meta.add("admitted_variants", result.generated_ids.size());
    meta.add("checkpoint", ckpt_path.generic_string());
    meta.write();

    out << "round  variants  evaded  rate    admitted  pool\n";
    for (const adversarial::RoundReport& r : result.rounds) {
      out << std::left << std::setw(7) << r.round << std::setw(10) << r.variants << std::setw(8)
          << r.evaded << std::setw(8) << std::fixed << std::setprecision(3) << r.evasion_rate
          << std::setw(10) << r.admitted << r.pool_size << '\n';
    }
    out << "hardened checkpoint: " << ckpt_path.string() << '\n';
    return kExitClean;
  });
}

namespace {

std::vector<std::string> read_nonblank_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::string> lines;
  for (std::string& line : text::split_lines(data)) {
    if (!text::trim(line).empty()) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

int cmd_quality(const RunConfig& cfg, const QualityOptions& opts, std::ostream& out,
                std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    RunMeta meta(cfg, "quality");
    std::vector<std::string> candidates = read_nonblank_lines(opts.explanations);
    std::vector<std::string> references = read_nonblank_lines(opts.references);
    require(!candidates.empty(), Errc::EmptyInput, "no explanations to score");
    require(candidates.size() == references.size(), Errc::LengthMismatch,
            "explanation and reference line counts differ");

    explain::UnigramModel lm = explain::UnigramModel::from_corpus(references);
    std::size_t topics = std::min<std::size_t>(5, candidates.size());
    double coherence = explain::topic_coherence(candidates, topics);

    std::filesystem::create_directories(cfg.output_dir);
    std::string hash = config_hash(cfg);
    std::filesystem::path rows_path = cfg.output_dir / "quality.jsonl";
    std::ofstream rows = open_artifact(rows_path);
    out << "row  perplexity  coherence  fres      rouge1  cosine\n";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      explain::TextQualityReport report =
          explain::assess_quality(candidates[i], references[i], lm, coherence);
      json row;
      row["config_hash"] = hash;
      row["row"] = i;
      row["perplexity"] = report.perplexity;
      row["topic_coherence"] = report.topic_coherence;
      row["fres"] = report.fres;
      row["rouge1_recall"] = report.rouge1_recall;
      row["cosine"] = report.cosine;
      rows << row.dump() << '\n';
      out << std::left << std::setw(5) << i << std::setw(12) << std::fixed << std::setprecision(3)
          << report.perplexity << std::setw(11) << report.topic_coherence << std::setw(10)
          << report.fres << std::setw(8) << report.rouge1_recall << report.cosine << '\n';
    }
    close_artifact(rows, rows_path);

    meta.add("rows", candidates.size());
    meta.add("topics", topics);
    meta.write();
    return kExitClean;
  });
}

}  // namespace phishguard::cli
