#pragma once

#include <string>
#include <vector>

#include "wordrep/model.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_word_error = 0.0;
  double wall_seconds = 0.0;  // informational; not part of the checkpoint bytes
};

struct Checkpoint {
  int format_version = 1;
  ModelConfig config;
  ModelParams<float> params;
  std::vector<EpochLog> log;
  Rng::State rng_state;
  std::string inventory_checksum;
  int first_zero_epoch = -1;  // -1: never reached zero train error
};

// Versioned container: a human-readable header (config, tensor shapes,
// per-tensor checksums) followed by raw little-endian float32 blobs.
// save -> load -> save is byte-identical.
std::string checkpoint_to_bytes(const Checkpoint& ckpt);
Checkpoint checkpoint_from_bytes(const std::string& bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Parses only the header; enough to reconstruct config and parameter count.
struct CheckpointHeader {
  int format_version = 1;
  ModelConfig config;
  std::string inventory_checksum;
  long parameter_count = 0;
};
CheckpointHeader read_checkpoint_header(const std::string& path);

}  // namespace wordrep
