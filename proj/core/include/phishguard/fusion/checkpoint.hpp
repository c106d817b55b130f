#pragma once

#include <filesystem>
#include <string>

#include "phishguard/fusion/types.hpp"

namespace phishguard::fusion {

struct Checkpoint {
  int version = 1;
  PpoConfig config;
  PolicyParams params;
  std::uint64_t seed = 0;
  std::uint64_t batches_seen = 0;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);

/* Throws FormatMismatch on bad shape, missing field, or unknown version. */
Checkpoint checkpoint_from_json(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace phishguard::fusion
