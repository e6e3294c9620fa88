#include "wordrep/pipeline_support.hpp"

#include <filesystem>
#include <stdexcept>

#include "wordrep/ioutil.hpp"

namespace wordrep {

PipelineContext::PipelineContext(const ExperimentConfig& config)
    : cfg(config),
      inventory(Inventory::load(config.inventory_path)),
      lexicon(load_lexicon(config.lexicon_path, inventory)),
      affixes(load_affixes(config.affix_path, inventory)),
      pool(config.threads) {}

namespace {
void require_artifact(const std::string& path, const char* producer) {
  if (!std::filesystem::exists(path))
    throw std::runtime_error("missing artifact " + path + "; run `wordrep " + producer + "` first");
}
}  // namespace

Checkpoint PipelineContext::load_checkpoint_artifact() const {
  const std::string path = cfg.output_dir + "/train/model.ckpt";
  require_artifact(path, "train");
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.inventory_checksum != inventory.checksum())
    throw std::runtime_error("checkpoint " + path + " was trained against inventory " +
                             ckpt.inventory_checksum + ", current file is " + inventory.checksum());
  return ckpt;
}

EvalDataset PipelineContext::load_factorial_artifact() const {
  const std::string path = cfg.output_dir + "/datasets/factorial.tsv";
  require_artifact(path, "build-datasets");
  return factorial_from_tsv(read_file(path), inventory);
}

SonorityDataset PipelineContext::load_sonority_artifact() const {
  const std::string path = cfg.output_dir + "/datasets/sonority.tsv";
  require_artifact(path, "build-datasets");
  return sonority_from_tsv(read_file(path), inventory);
}

}  // namespace wordrep
