#include "wordrep/pipeline.hpp"

#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include "json.hpp"
#include "wordrep/ablation.hpp"
#include "wordrep/grid_search.hpp"
#include "wordrep/ioutil.hpp"
#include "wordrep/mlem.hpp"
#include "wordrep/pipeline_support.hpp"
#include "wordrep/replication.hpp"
#include "wordrep/representation.hpp"
#include "wordrep/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace wordrep {

namespace {

struct StageWriter {
  std::string dir;
  const ExperimentConfig* cfg = nullptr;
  std::string inventory_checksum;
  std::map<std::string, std::string> files;  // name -> checksum
  json extra = json::object();

  std::string path(const std::string& name) const { return dir + "/" + name; }

  void write(const std::string& name, std::string_view bytes) {
    atomic_write_file(path(name), bytes);
    files[name] = bytes_checksum(bytes);
  }

  void finish(const std::string& artifact) {
    json manifest;
    manifest["artifact"] = artifact;
    manifest["config_hash"] = cfg->hash();
    manifest["seed"] = cfg->seed;
    manifest["inventory_checksum"] = inventory_checksum;
    manifest["files"] = files;
    if (!extra.empty()) manifest["parameters"] = extra;
    atomic_write_file(path("manifest.json"), manifest.dump(2) + "\n");
  }
};

int fail(std::ostream& log, const std::vector<std::string>& problems) {
  log << "config validation failed:\n";
  for (const auto& p : problems) log << "  - " << p << '\n';
  return 1;
}

json to_json(const SpearmanResult& r) {
  json j;
  j["defined"] = r.defined;
  j["n"] = r.n;
  if (r.defined) {
    j["rho"] = r.rho;
    j["p_value"] = r.p_value;
    j["method"] = r.method;
  }
  return j;
}

json to_json(const EvalSummary& s) {
  json j;
  j["n"] = s.n;
  j["defined"] = s.defined;
  if (s.defined) {
    j["error_rate"] = s.error_rate;
    j["mean_edit_distance"] = s.mean_edit_distance;
  }
  return j;
}

json to_json(const PositionalProfile& p) {
  json j;
  j["n_bins"] = p.n_bins;
  j["errors"] = p.errors;
  j["opportunities"] = p.opportunities;
  j["rate"] = p.rate;
  return j;
}

json to_json(const RegressionReport& r) {
  json j;
  j["response"] = r.response;
  j["n"] = r.n;
  j["r2"] = r.r2;
  j["degenerate"] = r.degenerate;
  json terms = json::array();
  for (const auto& t : r.terms)
    terms.push_back({{"name", t.name}, {"coef", t.coef}, {"p_value", t.p_value}});
  j["terms"] = terms;
  json fi = json::array();
  for (const auto& f : r.fi)
    fi.push_back(
        {{"name", f.name}, {"importance", f.importance}, {"signed_importance", f.signed_importance}});
  j["feature_importance"] = fi;
  return j;
}

json sonority_json(const SonorityEffect& effect) {
  auto table = [](const std::vector<GradientStat>& rows) {
    json out = json::array();
    for (const auto& r : rows)
      out.push_back({{"gradient", r.gradient}, {"n", r.n}, {"errors", r.errors}, {"rate", r.rate}});
    return out;
  };
  json j;
  j["ccv"] = {{"rho", to_json(effect.ccv_rho)}, {"per_gradient", table(effect.ccv_table)}};
  j["vcc"] = {{"rho", to_json(effect.vcc_rho)}, {"per_gradient", table(effect.vcc_table)}};
  return j;
}

// Error rate per phoneme length for one (lexicality, morphology) slice.
std::map<int, std::pair<long, long>> length_table(const std::vector<PredictionRecord>& records,
                                                  const EvalDataset& ds, Lexicality lex,
                                                  Morphology morph) {
  std::map<int, std::pair<long, long>> out;
  for (const auto& r : records) {
    const auto& item = ds.items[static_cast<size_t>(r.item_index)];
    if (item.lexicality != lex || item.morphology != morph) continue;
    auto& cell = out[static_cast<int>(item.phonemes.size())];
    cell.first += 1;
    cell.second += r.correct ? 0 : 1;
  }
  return out;
}

json length_table_json(const std::map<int, std::pair<long, long>>& table) {
  json out = json::array();
  for (const auto& [len, cell] : table) {
    out.push_back({{"length", len},
                   {"n", cell.first},
                   {"errors", cell.second},
                   {"rate", cell.first > 0 ? static_cast<double>(cell.second) /
                                                 static_cast<double>(cell.first)
                                           : 0.0}});
  }
  return out;
}

svg::Series length_series(const std::map<int, std::pair<long, long>>& table,
                          const std::string& label, const std::string& color, bool dashed) {
  svg::Series s;
  s.label = label;
  s.color = color;
  s.dashed = dashed;
  for (const auto& [len, cell] : table) {
    if (cell.first > 0)
      s.points.emplace_back(len, static_cast<double>(cell.second) / static_cast<double>(cell.first));
  }
  return s;
}

// The full behavioral battery on one set of records; shared by `evaluate`
// and the ablation deep dive.
json behavioral_effects(const std::vector<PredictionRecord>& records, const EvalDataset& dataset,
                        const std::vector<PredictionRecord>& sonority_records,
                        const SonorityDataset& sonority, const ExperimentConfig& cfg) {
  json effects;
  effects["summary"] = to_json(summarize(records));

  std::vector<PredictionRecord> real, pseudo;
  std::vector<double> pseudo_len, pseudo_err, real_zipf, real_err;
  long high_n = 0, high_wrong = 0, low_n = 0, low_wrong = 0;
  long simple_n = 0, simple_wrong = 0, complex_n = 0, complex_wrong = 0;
  for (const auto& r : records) {
    const auto& item = dataset.items[static_cast<size_t>(r.item_index)];
    const bool wrong = !r.correct;
    if (item.lexicality == Lexicality::kReal) {
      real.push_back(r);
      if (item.zipf) {
        real_zipf.push_back(*item.zipf);
        real_err.push_back(wrong ? 1.0 : 0.0);
      }
      if (item.freq_class == FreqClass::kHigh) {
        ++high_n;
        high_wrong += wrong;
      } else if (item.freq_class == FreqClass::kLow) {
        ++low_n;
        low_wrong += wrong;
      }
    } else {
      pseudo.push_back(r);
      pseudo_len.push_back(static_cast<double>(item.phonemes.size()));
      pseudo_err.push_back(wrong ? 1.0 : 0.0);
    }
    if (item.morphology == Morphology::kSimple) {
      ++simple_n;
      simple_wrong += wrong;
    } else {
      ++complex_n;
      complex_wrong += wrong;
    }
  }
  auto rate = [](long wrong, long n) {
    return n > 0 ? static_cast<double>(wrong) / static_cast<double>(n) : 0.0;
  };

  effects["lexicality"] = {{"real", to_json(summarize(real))},
                           {"pseudo", to_json(summarize(pseudo))}};
  effects["frequency"] = {
      {"high_error_rate", rate(high_wrong, high_n)},
      {"low_error_rate", rate(low_wrong, low_n)},
      {"zipf_error_rho",
       to_json(spearman(real_zipf, real_err, cfg.spearman_permutations, cfg.seed + 11))}};
  effects["length"] = {
      {"pseudo_rho",
       to_json(spearman(pseudo_len, pseudo_err, cfg.spearman_permutations, cfg.seed + 12))},
      {"tables",
       {{"real_simple", length_table_json(length_table(records, dataset, Lexicality::kReal,
                                                        Morphology::kSimple))},
        {"real_complex", length_table_json(length_table(records, dataset, Lexicality::kReal,
                                                         Morphology::kComplex))},
        {"pseudo_simple", length_table_json(length_table(records, dataset, Lexicality::kPseudo,
                                                          Morphology::kSimple))},
        {"pseudo_complex", length_table_json(length_table(records, dataset, Lexicality::kPseudo,
                                                           Morphology::kComplex))}}}};
  effects["morphology"] = {{"simple_error_rate", rate(simple_wrong, simple_n)},
                           {"complex_error_rate", rate(complex_wrong, complex_n)}};

  const auto profiles = positional_error_profile_split(records, dataset);
  effects["positional"] = {{"real", to_json(profiles.real)},
                           {"pseudo", to_json(profiles.pseudo)},
                           {"combined", to_json(profiles.combined)}};

  effects["sonority"] = sonority_json(
      sonority_effect(sonority_records, sonority, cfg.spearman_permutations, cfg.seed + 13));

  RegressionOptions reg_opts;
  reg_opts.n_coef_permutations = cfg.regression_permutations;
  reg_opts.n_fi_permutations = cfg.regression_permutations;
  reg_opts.seed = cfg.seed + 14;
  effects["regression"] = to_json(regression_fi(records, dataset, reg_opts));

  json error_types = json::array();
  for (const auto& row : error_type_table(records, dataset)) {
    error_types.push_back({{"condition_id", row.condition_id},
                           {"label", row.label},
                           {"n", row.n},
                           {"incorrect", row.incorrect},
                           {"length", row.type_counts[0]},
                           {"position", row.type_counts[1]},
                           {"identity", row.type_counts[2]},
                           {"other", row.type_counts[3]},
                           {"mean_insertions", row.mean_insertions},
                           {"mean_deletions", row.mean_deletions},
                           {"mean_substitutions", row.mean_substitutions}});
  }
  effects["error_types"] = error_types;
  return effects;
}

void write_behavior_figures(StageWriter& stage, const std::vector<PredictionRecord>& records,
                            const EvalDataset& dataset,
                            const std::vector<PredictionRecord>& sonority_records,
                            const SonorityDataset& sonority, const json& effects) {
  std::vector<svg::Series> panel_a = {
      length_series(length_table(records, dataset, Lexicality::kReal, Morphology::kSimple),
                    "real simple", "#d62728", false),
      length_series(length_table(records, dataset, Lexicality::kReal, Morphology::kComplex),
                    "real complex", "#d62728", true),
      length_series(length_table(records, dataset, Lexicality::kPseudo, Morphology::kSimple),
                    "pseudo simple", "#1f77b4", false),
      length_series(length_table(records, dataset, Lexicality::kPseudo, Morphology::kComplex),
                    "pseudo complex", "#1f77b4", true)};
  stage.write("fig_length_effect.svg",
              svg::line_panel("Error rate by phoneme length", "phonemes", "error rate", panel_a));

  std::vector<std::string> fi_names;
  std::vector<double> fi_values;
  for (const auto& f : effects["regression"]["feature_importance"]) {
    fi_names.push_back(f["name"].get<std::string>());
    fi_values.push_back(f["signed_importance"].get<double>());
  }
  stage.write("fig_feature_importance.svg",
              svg::bar_panel("Signed feature importance", fi_names, fi_values));

  const auto profiles = positional_error_profile_split(records, dataset);
  auto profile_series = [](const PositionalProfile& p, const std::string& label,
                           const std::string& color) {
    svg::Series s;
    s.label = label;
    s.color = color;
    for (int b = 0; b < p.n_bins; ++b) {
      if (p.opportunities[static_cast<size_t>(b)] > 0)
        s.points.emplace_back((b + 0.5) / p.n_bins, p.rate[static_cast<size_t>(b)]);
    }
    return s;
  };
  stage.write("fig_positional.svg",
              svg::line_panel("Error rate by relative position", "relative position", "error rate",
                              {profile_series(profiles.real, "real", "#d62728"),
                               profile_series(profiles.pseudo, "pseudo", "#1f77b4")}));

  const auto sonority_eff = sonority_effect(sonority_records, sonority, 100, 1);
  auto gradient_series = [](const std::vector<GradientStat>& table, const std::string& label,
                            const std::string& color) {
    svg::Series s;
    s.label = label;
    s.color = color;
    for (const auto& g : table) s.points.emplace_back(g.gradient, g.rate);
    return s;
  };
  stage.write("fig_sonority.svg",
              svg::line_panel("Error rate by sonority gradient", "gradient", "error rate",
                              {gradient_series(sonority_eff.ccv_table, "CCV", "#2ca02c"),
                               gradient_series(sonority_eff.vcc_table, "VCC", "#9467bd")}));
}

}  // namespace

int run_build_datasets(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problems = cfg.validate(true);
  if (!problems.empty()) return fail(log, problems);
  PipelineContext ctx(cfg);

  log << "fitting trigram model over " << ctx.lexicon.entries.size() << " words\n";
  const TrigramModel trigram = TrigramModel::fit(ctx.lexicon, ctx.inventory);
  log << "building factorial dataset (" << cfg.per_cell << " per condition)\n";
  const EvalDataset factorial = build_factorial_dataset(ctx.lexicon, trigram, ctx.inventory,
                                                        ctx.affixes, cfg.seed, cfg.per_cell,
                                                        cfg.filter_threshold);
  log << "building sonority dataset\n";
  const SonorityDataset sonority = build_sonority_dataset(ctx.lexicon, ctx.inventory);

  StageWriter stage{cfg.output_dir + "/datasets", &cfg, ctx.inventory.checksum()};
  stage.write("factorial.tsv", factorial_to_tsv(factorial, ctx.inventory));
  stage.write("sonority.tsv", sonority_to_tsv(sonority, ctx.inventory));
  stage.extra["per_cell"] = cfg.per_cell;
  stage.extra["filter_threshold"] = cfg.filter_threshold;
  stage.extra["lexicon_checksum"] = ctx.lexicon.source_checksum;
  stage.extra["factorial_items"] = factorial.items.size();
  stage.extra["sonority_items"] = sonority.items.size();
  stage.finish("datasets");
  log << "wrote " << factorial.items.size() << " factorial items, " << sonority.items.size()
      << " sonority items\n";
  return 0;
}

int run_train(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problems = cfg.validate(true);
  if (!problems.empty()) return fail(log, problems);
  PipelineContext ctx(cfg);

  ModelConfig mc = cfg.model;
  mc.seed = cfg.seed;
  const auto corpus = sample_corpus(ctx.lexicon, cfg.corpus_total, cfg.seed);
  log << "training " << to_string(mc.cell) << " H=" << mc.hidden_size << " on "
      << corpus.size() << " samples (" << ctx.lexicon.entries.size() << " unique words)\n";

  std::string log_tsv = "epoch\tmean_loss\ttrain_word_error\twall_seconds\n";
  const Checkpoint ckpt =
      train_model(mc, ctx.lexicon, corpus, ctx.inventory, ctx.pool, [&](const EpochLog& e) {
        log_tsv += std::to_string(e.epoch) + "\t" + format_double(e.mean_loss) + "\t" +
                   format_double(e.train_word_error) + "\t" + format_double(e.wall_seconds) + "\n";
        log << "epoch " << e.epoch << " loss " << e.mean_loss << " train_wer " << e.train_word_error
            << '\n';
      });

  StageWriter stage{cfg.output_dir + "/train", &cfg, ctx.inventory.checksum()};
  stage.write("model.ckpt", checkpoint_to_bytes(ckpt));
  stage.write("train_log.tsv", log_tsv);
  stage.extra["parameter_count"] = ckpt.config.parameter_count();
  stage.extra["first_zero_epoch"] = ckpt.first_zero_epoch;
  stage.extra["epochs_run"] = ckpt.log.size();
  stage.finish("train");
  log << "final train word error: " << (ckpt.log.empty() ? 1.0 : ckpt.log.back().train_word_error)
      << "\n";
  return 0;
}

int run_grid_search(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problems = cfg.validate(true);
  if (!problems.empty()) return fail(log, problems);
  PipelineContext ctx(cfg);

  std::vector<ModelConfig> grid;
  for (const auto& cell : cfg.grid_cells) {
    for (int h : cfg.grid_hidden_sizes) {
      for (double p : cfg.grid_dropouts) {
        for (int b : cfg.grid_batch_sizes) {
          for (double lr : cfg.grid_learning_rates) {
            ModelConfig mc = cfg.model;
            mc.cell = cell_kind_from_string(cell);
            mc.hidden_size = h;
            mc.dropout = p;
            mc.batch_size = b;
            mc.learning_rate = lr;
            mc.seed = cfg.seed;
            grid.push_back(mc);
          }
        }
      }
    }
  }
  log << "grid search over " << grid.size() << " configs, " << cfg.grid_folds << " folds\n";
  const GridReport report = cross_validate_grid(grid, ctx.lexicon, ctx.inventory, cfg.corpus_total,
                                                cfg.grid_folds, cfg.grid_early_stop_epoch, cfg.seed,
                                                ctx.pool);
  for (const auto& w : report.warnings) log << "warning: " << w << '\n';

  json j;
  j["k_folds"] = report.k_folds;
  j["early_stop_epoch"] = report.early_stop_epoch;
  j["corpus_total"] = report.corpus_total;
  j["warnings"] = report.warnings;
  json entries = json::array();
  for (const auto& e : report.entries) {
    json folds = json::array();
    for (const auto& f : e.folds)
      folds.push_back({{"fold", f.fold},
                       {"train_word_error", f.train_word_error},
                       {"val_word_error", f.val_word_error},
                       {"val_phoneme_error", f.val_phoneme_error}});
    entries.push_back({{"cell", std::string(to_string(e.config.cell))},
                       {"hidden_size", e.config.hidden_size},
                       {"num_layers", e.config.num_layers},
                       {"dropout", e.config.dropout},
                       {"batch_size", e.config.batch_size},
                       {"learning_rate", e.config.learning_rate},
                       {"param_count", e.param_count},
                       {"mean_train_word_error", e.mean_train_word_error},
                       {"mean_val_word_error", e.mean_val_word_error},
                       {"mean_val_phoneme_error", e.mean_val_phoneme_error},
                       {"folds", folds}});
  }
  j["entries"] = entries;

  StageWriter stage{cfg.output_dir + "/grid", &cfg, ctx.inventory.checksum()};
  stage.write("grid_report.tsv", grid_report_to_tsv(report));
  stage.write("grid_report.json", j.dump(2) + "\n");
  stage.finish("grid-search");
  if (!report.entries.empty()) {
    const auto& best = report.entries.front().config;
    log << "best config: " << to_string(best.cell) << " H=" << best.hidden_size
        << " dropout=" << best.dropout << " batch=" << best.batch_size << " lr=" << best.learning_rate
        << '\n';
  }
  return 0;
}

int run_evaluate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problems = cfg.validate(true);
  if (!problems.empty()) return fail(log, problems);
  PipelineContext ctx(cfg);
  const Checkpoint ckpt = ctx.load_checkpoint_artifact();
  const EvalDataset factorial = ctx.load_factorial_artifact();
  const SonorityDataset sonority = ctx.load_sonority_artifact();

  log << "evaluating " << factorial.items.size() << " factorial items and " << sonority.items.size()
      << " sonority items\n";
  const auto records = evaluate_dataset(ckpt, factorial, ctx.pool);
  const auto sonority_records = evaluate_sonority(ckpt, sonority, ctx.pool);
  const json effects = behavioral_effects(records, factorial, sonority_records, sonority, cfg);

  StageWriter stage{cfg.output_dir + "/eval", &cfg, ctx.inventory.checksum()};
  stage.write("records.tsv", records_to_tsv(records, factorial, ctx.inventory));
  stage.write("effects.json", effects.dump(2) + "\n");
  if (cfg.emit_svg)
    write_behavior_figures(stage, records, factorial, sonority_records, sonority, effects);
  stage.finish("evaluate");
  log << "factorial error rate: " << effects["summary"]["error_rate"].dump() << '\n';
  return 0;
}

int run_represent(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problems = cfg.validate(true);
  if (!problems.empty()) return fail(log, problems);
  PipelineContext ctx(cfg);
  const Checkpoint ckpt = ctx.load_checkpoint_artifact();

  const Eigen::MatrixXd embeddings = phoneme_embedding_matrix(ckpt, ctx.inventory);
  const DistanceMetric metric = cfg.representation_metric == "cosine" ? DistanceMetric::kCosine
                                                                      : DistanceMetric::kEuclidean;
  const RepresentationReport rep = representation_report(embeddings, metric);

  std::vector<std::string> symbols;
  std::vector<int> class_labels;
  for (int i = 0; i < ctx.inventory.size(); ++i) {
    symbols.push_back(ctx.inventory.at(i).symbol);
    class_labels.push_back(ctx.inventory.at(i).is_vowel() ? 1 : 0);
  }
  const ClassSeparation sep = class_separation(rep.dsm, class_labels);

  MlemOptions mlem_opts;
  mlem_opts.bootstrap = cfg.mlem_bootstrap;
  mlem_opts.permutations = cfg.mlem_permutations;
  mlem_opts.seed = cfg.seed;
  const MlemReport vowels = mlem_fit(rep.dsm, PhonemeClass::kVowel, ctx.inventory, mlem_opts);
  const MlemReport consonants = mlem_fit(rep.dsm, PhonemeClass::kConsonant, ctx.inventory, mlem_opts);

  auto mlem_json = [](const MlemReport& r) {
    json j;
    j["class"] = std::string(to_string(r.cls));
    j["lambda"] = r.lambda;
    j["r2"] = r.r2;
    j["intercept"] = r.intercept;
    j["n_pairs"] = r.n_pairs;
    json feats = json::array();
    for (const auto& f : r.features)
      feats.push_back({{"name", f.name},
                       {"importance", f.importance},
                       {"std_error", f.std_error},
                       {"p_value", f.p_value}});
    j["features"] = feats;
    return j;
  };

  json j;
  j["metric"] = cfg.representation_metric;
  j["class_separation"] = {{"mean_within", sep.mean_within},
                           {"mean_between", sep.mean_between},
                           {"silhouette", sep.silhouette}};
  j["mlem"] = {{"vowel", mlem_json(vowels)}, {"consonant", mlem_json(consonants)}};
  json order = json::array();
  for (int i : rep.leaf_order) order.push_back(symbols[static_cast<size_t>(i)]);
  j["dendrogram_order"] = order;

  StageWriter stage{cfg.output_dir + "/represent", &cfg, ctx.inventory.checksum()};
  stage.write("dsm.tsv", matrix_to_tsv(rep.dsm, symbols));
  stage.write("pca.tsv", matrix_to_tsv(rep.projection, symbols));
  stage.write("representation.json", j.dump(2) + "\n");
  if (cfg.emit_svg) {
    Eigen::MatrixXd ordered(rep.dsm.rows(), rep.dsm.cols());
    std::vector<std::string> ordered_labels;
    for (Eigen::Index a = 0; a < rep.dsm.rows(); ++a) {
      ordered_labels.push_back(symbols[static_cast<size_t>(rep.leaf_order[static_cast<size_t>(a)])]);
      for (Eigen::Index b = 0; b < rep.dsm.cols(); ++b)
        ordered(a, b) = rep.dsm(rep.leaf_order[static_cast<size_t>(a)],
                                rep.leaf_order[static_cast<size_t>(b)]);
    }
    stage.write("fig_dsm.svg", svg::heatmap("Phoneme dissimilarity matrix", ordered, ordered_labels));
    std::vector<svg::ScatterPoint> pts;
    for (Eigen::Index i = 0; i < rep.projection.rows(); ++i)
      pts.push_back({rep.projection(i, 0), rep.projection(i, 1),
                     class_labels[static_cast<size_t>(i)] ? "#1f77b4" : "#d62728"});
    stage.write("fig_pca.svg", svg::scatter_panel("Phoneme PCA projection", "pc1", "pc2", pts));
    auto mlem_fig = [&](const MlemReport& r, const std::string& name) {
      std::vector<std::string> names;
      std::vector<double> values, errors;
      for (const auto& f : r.features) {
        names.push_back(f.name);
        values.push_back(f.importance);
        errors.push_back(f.std_error);
      }
      stage.write(name, svg::bar_panel("Feature importance (" + std::string(to_string(r.cls)) + "s)",
                                       names, values, errors));
    };
    mlem_fig(vowels, "fig_mlem_vowels.svg");
    mlem_fig(consonants, "fig_mlem_consonants.svg");
  }
  stage.finish("represent");
  log << "class separation: within " << sep.mean_within << ", between " << sep.mean_between
      << ", silhouette " << sep.silhouette << '\n';
  return 0;
}

int run_ablate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problems = cfg.validate(true);
  if (!problems.empty()) return fail(log, problems);
  PipelineContext ctx(cfg);
  const Checkpoint ckpt = ctx.load_checkpoint_artifact();
  const EvalDataset factorial = ctx.load_factorial_artifact();
  const SonorityDataset sonority = ctx.load_sonority_artifact();

  SweepOptions sweep_opts;
  sweep_opts.zero_cell = cfg.ablation_zero_cell;
  sweep_opts.seed = cfg.seed;
  log << "sweeping " << 2 * ckpt.config.num_layers * ckpt.config.hidden_size << " ablations\n";
  const auto sweep = ablation_sweep(ckpt, factorial, &sonority, ctx.pool, sweep_opts);

  const auto profiles = sweep_unit_profiles(ckpt, factorial, ctx.pool, sweep_opts);
  const ClusterReport clusters = cluster_unit_profiles(profiles, 50, cfg.seed);

  json clusters_json;
  clusters_json["degenerate"] = clusters.degenerate;
  clusters_json["selected_k"] = clusters.best.k;
  clusters_json["mean_silhouette"] = clusters.best.mean_silhouette;
  json per_k = json::array();
  for (const auto& [k, sil] : clusters.silhouette_per_k)
    per_k.push_back({{"k", k}, {"silhouette", sil}});
  clusters_json["silhouette_per_k"] = per_k;
  json profile_rows = json::array();
  for (size_t i = 0; i < profiles.size(); ++i) {
    profile_rows.push_back({{"side", std::string(to_string(profiles[i].location.side))},
                            {"layer", profiles[i].location.layer},
                            {"unit", profiles[i].location.unit},
                            {"degenerate", profiles[i].degenerate},
                            {"lexicality", profiles[i].fi[0]},
                            {"morphology", profiles[i].fi[1]},
                            {"length", profiles[i].fi[2]},
                            {"frequency", profiles[i].fi[3]},
                            {"cluster", clusters.degenerate
                                            ? 0
                                            : clusters.best.assignment[i]}});
  }
  clusters_json["profiles"] = profile_rows;

  // Deep dive on the strongest ablation, Fig-2 style.
  const auto& top = sweep.front();
  const auto top_records = evaluate_dataset(ckpt, factorial, ctx.pool, &top.location);
  const auto top_sonority = evaluate_sonority(ckpt, sonority, ctx.pool, &top.location);
  json top_effects = behavioral_effects(top_records, factorial, top_sonority, sonority, cfg);
  top_effects["location"] = {{"side", std::string(to_string(top.location.side))},
                             {"layer", top.location.layer},
                             {"unit", top.location.unit}};

  StageWriter stage{cfg.output_dir + "/ablate", &cfg, ctx.inventory.checksum()};
  stage.write("sweep.tsv", sweep_to_tsv(sweep));
  stage.write("clusters.json", clusters_json.dump(2) + "\n");
  stage.write("top_unit_effects.json", top_effects.dump(2) + "\n");
  stage.write("top_unit_records.tsv", records_to_tsv(top_records, factorial, ctx.inventory));
  if (cfg.emit_svg) {
    std::vector<svg::ScatterPoint> pts;
    for (const auto& rec : sweep)
      pts.push_back({rec.real_error_rate * 100.0, rec.pseudo_error_rate * 100.0,
                     rec.location.side == AblationMask::Side::kEncoder ? "#1f77b4" : "#d62728"});
    stage.write("fig_ablation_scatter.svg",
                svg::scatter_panel("Ablation sweep (encoder blue, decoder red)", "real error %",
                                   "pseudo error %", pts, true));
  }
  stage.extra["zero_cell"] = cfg.ablation_zero_cell;
  stage.extra["records"] = sweep.size();
  stage.finish("ablate");
  log << "strongest ablation: " << to_string(top.location.side) << " unit " << top.location.unit
      << " error rate " << top.factorial.error_rate << '\n';
  return 0;
}

int run_replicate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problems = cfg.validate(true);
  if (!problems.empty()) return fail(log, problems);
  PipelineContext ctx(cfg);
  const EvalDataset factorial = ctx.load_factorial_artifact();
  const SonorityDataset sonority = ctx.load_sonority_artifact();

  ModelConfig mc = cfg.model;
  ReplicationOptions opts;
  opts.ablation_threshold = cfg.ablation_threshold;
  opts.spearman_permutations = cfg.spearman_permutations;
  opts.corpus_seed = cfg.seed;
  log << "training " << cfg.n_seeds << " replicate models\n";
  const ReplicationReport report = multi_seed_replication(
      mc, cfg.n_seeds, ctx.lexicon, cfg.corpus_total, ctx.inventory, factorial, sonority, ctx.pool,
      opts);

  json j;
  j["ablation_threshold"] = report.ablation_threshold;
  json seeds = json::array();
  for (const auto& s : report.seeds) {
    seeds.push_back({{"seed", s.seed},
                     {"first_zero_epoch", s.first_zero_epoch},
                     {"final_train_error", s.final_train_error},
                     {"real", to_json(s.real)},
                     {"pseudo", to_json(s.pseudo)},
                     {"pseudo_length_rho", to_json(s.pseudo_length_rho)},
                     {"ccv_rho", to_json(s.sonority.ccv_rho)},
                     {"vcc_rho", to_json(s.sonority.vcc_rho)},
                     {"strong_units", s.strong_units},
                     {"strongest",
                      {{"side", std::string(to_string(s.strongest.side))},
                       {"unit", s.strongest.unit},
                       {"error_rate", s.strongest_error_rate},
                       {"length_fraction", s.strongest_length_fraction},
                       {"predominantly_length", s.strongest_predominantly_length}}}});
  }
  j["seeds"] = seeds;
  json aggregates = json::object();
  for (const auto& [name, ci] : report.aggregates)
    aggregates[name] = {{"mean", ci.mean}, {"ci95", ci.ci95}, {"n", ci.n}};
  j["aggregates"] = aggregates;

  StageWriter stage{cfg.output_dir + "/replicate", &cfg, ctx.inventory.checksum()};
  stage.write("replicate.json", j.dump(2) + "\n");
  stage.extra["n_seeds"] = cfg.n_seeds;
  stage.finish("replicate");
  log << "replication aggregates over " << cfg.n_seeds << " seeds written\n";
  return 0;
}

int run_report(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problems = cfg.validate(false);
  if (!problems.empty()) return fail(log, problems);

  json summary;
  summary["config_hash"] = cfg.hash();
  int found = 0;
  auto pull = [&](const std::string& rel, const std::string& key) {
    const std::string path = cfg.output_dir + "/" + rel;
    if (!fs::exists(path)) return;
    try {
      summary[key] = json::parse(read_file(path));
      ++found;
    } catch (const std::exception& ex) {
      log << "skipping " << path << ": " << ex.what() << '\n';
    }
  };
  pull("datasets/manifest.json", "datasets_manifest");
  pull("train/manifest.json", "train_manifest");
  pull("grid/grid_report.json", "grid");
  pull("eval/effects.json", "effects");
  pull("represent/representation.json", "representation");
  pull("ablate/clusters.json", "unit_clusters");
  pull("ablate/top_unit_effects.json", "top_unit_effects");
  pull("replicate/replicate.json", "replication");
  if (found == 0) {
    log << "report: no artifacts found under " << cfg.output_dir << '\n';
    return 1;
  }

  StageWriter stage{cfg.output_dir + "/report", &cfg, ""};
  stage.write("summary.json", summary.dump(2) + "\n");

  // Flat CSV of headline statistics, when an evaluation exists.
  if (summary.contains("effects")) {
    const auto& e = summary["effects"];
    std::string csv = "metric,value\n";
    auto add = [&](const std::string& name, const json& v) {
      if (!v.is_null()) csv += name + "," + v.dump() + "\n";
    };
    add("error_rate", e["summary"].value("error_rate", json()));
    add("mean_edit_distance", e["summary"].value("mean_edit_distance", json()));
    if (e["lexicality"]["real"].value("defined", false))
      add("real_error_rate", e["lexicality"]["real"]["error_rate"]);
    if (e["lexicality"]["pseudo"].value("defined", false))
      add("pseudo_error_rate", e["lexicality"]["pseudo"]["error_rate"]);
    if (e["length"]["pseudo_rho"].value("defined", false))
      add("pseudo_length_rho", e["length"]["pseudo_rho"]["rho"]);
    if (e["sonority"]["ccv"]["rho"].value("defined", false))
      add("ccv_rho", e["sonority"]["ccv"]["rho"]["rho"]);
    if (e["sonority"]["vcc"]["rho"].value("defined", false))
      add("vcc_rho", e["sonority"]["vcc"]["rho"]["rho"]);
    stage.write("headline.csv", csv);
  }
  stage.finish("report");
  log << "report bundled " << found << " artifacts\n";
  return 0;
}

int run_command(const std::string& command, const ExperimentConfig& cfg, std::ostream& log) {
  if (command == "build-datasets") return run_build_datasets(cfg, log);
  if (command == "train") return run_train(cfg, log);
  if (command == "grid-search") return run_grid_search(cfg, log);
  if (command == "evaluate") return run_evaluate(cfg, log);
  if (command == "represent") return run_represent(cfg, log);
  if (command == "ablate") return run_ablate(cfg, log);
  if (command == "replicate") return run_replicate(cfg, log);
  if (command == "report") return run_report(cfg, log);
  throw std::invalid_argument("unknown command '" + command + "'");
}

}  // namespace wordrep
