#pragma once

#include "wordrep/checkpoint.hpp"
#include "wordrep/datasets.hpp"
#include "wordrep/experiment.hpp"
#include "wordrep/threadpool.hpp"

namespace wordrep {

// Inputs shared by the pipeline stages: the loaded data files, a worker pool
// sized by the config, and accessors for artifacts produced by earlier
// stages (with errors that name the stage that produces them).
struct PipelineContext {
  explicit PipelineContext(const ExperimentConfig& config);

  const ExperimentConfig& cfg;
  Inventory inventory;
  Lexicon lexicon;
  AffixSet affixes;
  ThreadPool pool;

  Checkpoint load_checkpoint_artifact() const;
  EvalDataset load_factorial_artifact() const;
  SonorityDataset load_sonority_artifact() const;
};

}  // namespace wordrep
