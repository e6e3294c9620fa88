#include "wordrep/experiment.hpp"

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "wordrep/ioutil.hpp"

namespace wordrep {

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::vector<std::string> parse_list(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& piece : split(s, ','))
    if (!strip(piece).empty()) out.push_back(strip(piece));
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& piece : parse_list(s)) out.push_back(parse_double(piece));
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& piece : parse_list(s)) out.push_back(std::stoi(piece));
  return out;
}

bool parse_flag(const std::string& s, const std::string& origin, int row) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::runtime_error(origin + ":" + std::to_string(row) + ": expected true/false, got '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_string(read_file(path), path);
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
    if (trimmed.front() == '[') {
      if (trimmed.back() != ']')
        throw std::runtime_error(origin + ":" + std::to_string(row) + ": malformed section header");
      section = trimmed.substr(1, trimmed.size() - 2);
      continue;
    }
    const size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(row) + ": expected key = value");
    const std::string key = strip(trimmed.substr(0, eq));
    const std::string value = strip(trimmed.substr(eq + 1));
    const std::string qualified = section + "." + key;

    try {
      if (qualified == "paths.lexicon") cfg.lexicon_path = value;
      else if (qualified == "paths.inventory") cfg.inventory_path = value;
      else if (qualified == "paths.affixes") cfg.affix_path = value;
      else if (qualified == "paths.output_dir") cfg.output_dir = value;
      else if (qualified == "dataset.corpus_total") cfg.corpus_total = std::stoull(value);
      else if (qualified == "dataset.per_cell") cfg.per_cell = std::stoi(value);
      else if (qualified == "dataset.filter_threshold") cfg.filter_threshold = parse_double(value);
      else if (qualified == "model.cell") cfg.model.cell = cell_kind_from_string(value);
      else if (qualified == "model.hidden_size") cfg.model.hidden_size = std::stoi(value);
      else if (qualified == "model.num_layers") cfg.model.num_layers = std::stoi(value);
      else if (qualified == "model.dropout") cfg.model.dropout = parse_double(value);
      else if (qualified == "model.batch_size") cfg.model.batch_size = std::stoi(value);
      else if (qualified == "model.learning_rate") cfg.model.learning_rate = parse_double(value);
      else if (qualified == "model.epochs") cfg.model.epochs = std::stoi(value);
      else if (qualified == "model.teacher_forcing") cfg.model.teacher_forcing = parse_double(value);
      else if (qualified == "model.max_decode_len") cfg.model.max_decode_len = std::stoi(value);
      else if (qualified == "model.grad_clip") cfg.model.grad_clip = parse_double(value);
      else if (qualified == "model.stop_when_memorized")
        cfg.model.stop_when_memorized = parse_flag(value, origin, row);
      else if (qualified == "grid.cells") cfg.grid_cells = parse_list(value);
      else if (qualified == "grid.hidden_sizes") cfg.grid_hidden_sizes = parse_ints(value);
      else if (qualified == "grid.dropouts") cfg.grid_dropouts = parse_doubles(value);
      else if (qualified == "grid.batch_sizes") cfg.grid_batch_sizes = parse_ints(value);
      else if (qualified == "grid.learning_rates") cfg.grid_learning_rates = parse_doubles(value);
      else if (qualified == "grid.folds") cfg.grid_folds = std::stoi(value);
      else if (qualified == "grid.early_stop_epoch") cfg.grid_early_stop_epoch = std::stoi(value);
      else if (qualified == "analysis.svg") cfg.emit_svg = parse_flag(value, origin, row);
      else if (qualified == "analysis.spearman_permutations")
        cfg.spearman_permutations = std::stoi(value);
      else if (qualified == "analysis.regression_permutations")
        cfg.regression_permutations = std::stoi(value);
      else if (qualified == "analysis.mlem_bootstrap") cfg.mlem_bootstrap = std::stoi(value);
      else if (qualified == "analysis.mlem_permutations") cfg.mlem_permutations = std::stoi(value);
      else if (qualified == "analysis.ablation_threshold") cfg.ablation_threshold = parse_double(value);
      else if (qualified == "analysis.ablation_zero_cell")
        cfg.ablation_zero_cell = parse_flag(value, origin, row);
      else if (qualified == "analysis.representation_metric") cfg.representation_metric = value;
      else if (qualified == "run.seed") cfg.seed = std::stoull(value);
      else if (qualified == "run.threads") cfg.threads = std::stoi(value);
      else if (qualified == "run.n_seeds") cfg.n_seeds = std::stoi(value);
      else
        throw std::runtime_error("unknown key '" + qualified + "'");
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& ex) {
      throw std::runtime_error(origin + ":" + std::to_string(row) + ": bad value for '" + qualified +
                               "': " + ex.what());
    }
  }
  return cfg;
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "[paths]\n";
  out << "lexicon = " << lexicon_path << '\n';
  out << "inventory = " << inventory_path << '\n';
  out << "affixes = " << affix_path << '\n';
  out << "output_dir = " << output_dir << '\n';
  out << "\n[dataset]\n";
  out << "corpus_total = " << corpus_total << '\n';
  out << "per_cell = " << per_cell << '\n';
  out << "filter_threshold = " << format_double(filter_threshold) << '\n';
  out << "\n[model]\n";
  out << "cell = " << to_string(model.cell) << '\n';
  out << "hidden_size = " << model.hidden_size << '\n';
  out << "num_layers = " << model.num_layers << '\n';
  out << "dropout = " << format_double(model.dropout) << '\n';
  out << "batch_size = " << model.batch_size << '\n';
  out << "learning_rate = " << format_double(model.learning_rate) << '\n';
  out << "epochs = " << model.epochs << '\n';
  out << "teacher_forcing = " << format_double(model.teacher_forcing) << '\n';
  out << "max_decode_len = " << model.max_decode_len << '\n';
  out << "grad_clip = " << format_double(model.grad_clip) << '\n';
  out << "stop_when_memorized = " << (model.stop_when_memorized ? "true" : "false") << '\n';
  out << "\n[grid]\n";
  out << "cells = " << join_strings(grid_cells) << '\n';
  out << "hidden_sizes = " << join_ints(grid_hidden_sizes) << '\n';
  out << "dropouts = " << join_doubles(grid_dropouts) << '\n';
  out << "batch_sizes = " << join_ints(grid_batch_sizes) << '\n';
  out << "learning_rates = " << join_doubles(grid_learning_rates) << '\n';
  out << "folds = " << grid_folds << '\n';
  out << "early_stop_epoch = " << grid_early_stop_epoch << '\n';
  out << "\n[analysis]\n";
  out << "svg = " << (emit_svg ? "true" : "false") << '\n';
  out << "spearman_permutations = " << spearman_permutations << '\n';
  out << "regression_permutations = " << regression_permutations << '\n';
  out << "mlem_bootstrap = " << mlem_bootstrap << '\n';
  out << "mlem_permutations = " << mlem_permutations << '\n';
  out << "ablation_threshold = " << format_double(ablation_threshold) << '\n';
  out << "ablation_zero_cell = " << (ablation_zero_cell ? "true" : "false") << '\n';
  out << "representation_metric = " << representation_metric << '\n';
  out << "\n[run]\n";
  out << "seed = " << seed << '\n';
  out << "threads = " << threads << '\n';
  out << "n_seeds = " << n_seeds << '\n';
  return out.str();
}

std::string ExperimentConfig::hash() const { return bytes_checksum(serialize()); }

std::vector<std::string> ExperimentConfig::validate(bool check_paths) const {
  std::vector<std::string> problems;
  auto check_file = [&](const std::string& path, const char* what) {
    if (path.empty()) {
      problems.push_back(std::string(what) + " path is empty");
    } else if (check_paths && !std::filesystem::exists(path)) {
      problems.push_back(std::string(what) + " file does not exist: " + path);
    }
  };
  check_file(lexicon_path, "lexicon");
  check_file(inventory_path, "inventory");
  check_file(affix_path, "affixes");
  if (output_dir.empty()) problems.push_back("output_dir is empty");
  if (per_cell < 1) problems.push_back("dataset.per_cell must be >= 1");
  if (filter_threshold < 0 || filter_threshold > 1)
    problems.push_back("dataset.filter_threshold must be in [0, 1]");
  try {
    model.validate();
  } catch (const std::exception& ex) {
    problems.push_back(ex.what());
  }
  if (grid_folds < 2) problems.push_back("grid.folds must be >= 2");
  if (grid_early_stop_epoch < 1) problems.push_back("grid.early_stop_epoch must be >= 1");
  for (const auto& c : grid_cells) {
    try {
      cell_kind_from_string(c);
    } catch (const std::exception&) {
      problems.push_back("grid.cells: unknown cell '" + c + "'");
    }
  }
  if (representation_metric != "euclidean" && representation_metric != "cosine")
    problems.push_back("analysis.representation_metric must be euclidean or cosine");
  if (ablation_threshold < 0 || ablation_threshold > 1)
    problems.push_back("analysis.ablation_threshold must be in [0, 1]");
  if (n_seeds < 1) problems.push_back("run.n_seeds must be >= 1");
  if (threads < 0) problems.push_back("run.threads must be >= 0");
  return problems;
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return serialize() == other.serialize();
}

}  // namespace wordrep
