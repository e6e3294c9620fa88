#pragma once

#include <iosfwd>
#include <string>

#include "wordrep/experiment.hpp"

namespace wordrep {

// Pipeline stages behind the CLI subcommands. Every stage validates its
// config, writes artifacts under <output_dir>/<stage>/ through atomic
// temp-and-rename, drops a manifest.json (config hash, seeds, inventory
// checksum, per-file checksums; no timestamps), and returns 0 only when all
// requested artifacts were produced.
int run_build_datasets(const ExperimentConfig& cfg, std::ostream& log);
int run_train(const ExperimentConfig& cfg, std::ostream& log);
int run_grid_search(const ExperimentConfig& cfg, std::ostream& log);
int run_evaluate(const ExperimentConfig& cfg, std::ostream& log);
int run_represent(const ExperimentConfig& cfg, std::ostream& log);
int run_ablate(const ExperimentConfig& cfg, std::ostream& log);
int run_replicate(const ExperimentConfig& cfg, std::ostream& log);
int run_report(const ExperimentConfig& cfg, std::ostream& log);

// Dispatch by subcommand name; throws std::invalid_argument for unknown
// commands.
int run_command(const std::string& command, const ExperimentConfig& cfg, std::ostream& log);

}  // namespace wordrep
