#include "phishguard/fusion/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "phishguard/errors.hpp"
#include "phishguard/fusion/policy.hpp"

namespace phishguard::fusion {

namespace {

struct LayerSlot {
  const char* name;
  std::vector<std::size_t> shape;
  std::vector<double>* data;
};

std::vector<LayerSlot> layer_slots(PolicyParams& p) {
  const auto h = static_cast<std::size_t>(kHiddenDim);
  const auto in = static_cast<std::size_t>(kInputDim);
  const auto n = static_cast<std::size_t>(kNumAgents);
  return {
      {"w1", {h, in}, &p.w1}, {"b1", {h}, &p.b1}, {"w2", {n, h}, &p.w2}, {"b2", {n}, &p.b2},
      {"u1", {h, in}, &p.u1}, {"c1", {h}, &p.c1}, {"u2", {1, h}, &p.u2},
  };
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::json doc;
  doc["version"] = ckpt.version;
  doc["config"] = {{"epsilon", ckpt.config.epsilon},
                   {"learning_rate", ckpt.config.learning_rate},
                   {"epochs_per_batch", ckpt.config.epochs_per_batch},
                   {"batch_size", ckpt.config.batch_size},
                   {"seed", ckpt.config.seed}};
  nlohmann::json layers = nlohmann::json::array();
  auto params = ckpt.params;
  for (const LayerSlot& slot : layer_slots(params)) {
    layers.push_back({{"name", slot.name}, {"shape", slot.shape}, {"data", *slot.data}});
  }
  layers.push_back({{"name", "c2"},
                    {"shape", {1}},
                    {"data", std::vector<double>{ckpt.params.c2}}});
  doc["layers"] = std::move(layers);
  doc["seed"] = ckpt.seed;
  doc["batches_seen"] = ckpt.batches_seen;
  return doc.dump(2);
}

Checkpoint checkpoint_from_json(std::string_view text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  require(!doc.is_discarded() && doc.is_object(), Errc::FormatMismatch,
          "checkpoint is not a JSON object");
  try {
    Checkpoint ckpt;
    ckpt.version = doc.at("version").get<int>();
    require(ckpt.version == 1, Errc::FormatMismatch, "unsupported checkpoint version");
    const auto& cfg = doc.at("config");
    ckpt.config.epsilon = cfg.at("epsilon").get<double>();
    ckpt.config.learning_rate = cfg.at("learning_rate").get<double>();
    ckpt.config.epochs_per_batch = cfg.at("epochs_per_batch").get<int>();
    ckpt.config.batch_size = cfg.at("batch_size").get<int>();
    ckpt.config.seed = cfg.at("seed").get<std::uint64_t>();

    ckpt.params = zero_params();
    auto slots = layer_slots(ckpt.params);
    std::vector<bool> seen(slots.size() + 1, false);
    for (const auto& layer : doc.at("layers")) {
      std::string name = layer.at("name").get<std::string>();
      auto shape = layer.at("shape").get<std::vector<std::size_t>>();
      auto data = layer.at("data").get<std::vector<double>>();
      if (name == "c2") {
        require(shape == std::vector<std::size_t>{1} && data.size() == 1, Errc::FormatMismatch,
                "checkpoint layer c2 has the wrong shape");
        ckpt.params.c2 = data[0];
        seen.back() = true;
        continue;
      }
      bool matched = false;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (name != slots[i].name) continue;
        require(shape == slots[i].shape && data.size() == slots[i].data->size(),
                Errc::FormatMismatch, "checkpoint layer " + name + " has the wrong shape");
        *slots[i].data = std::move(data);
        seen[i] = true;
        matched = true;
        break;
      }
      require(matched, Errc::FormatMismatch, "checkpoint has unknown layer " + name);
    }
    for (bool s : seen) {
      require(s, Errc::FormatMismatch, "checkpoint is missing a layer");
    }
    ckpt.seed = doc.at("seed").get<std::uint64_t>();
    ckpt.batches_seen = doc.at("batches_seen").get<std::uint64_t>();
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::FormatMismatch, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::IoFailure, "cannot open checkpoint for writing: " + path.string());
  out << checkpoint_to_json(ckpt) << '\n';
  out.flush();
  require(out.good(), Errc::IoFailure, "failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, "cannot open checkpoint: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str());
}

}  // namespace phishguard::fusion
