#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <tuple>

#include <nlohmann/json.hpp>

#include "eegrc/checkpoint.hpp"
#include "eegrc/dataset.hpp"
#include "eegrc/erp_cohort.hpp"
#include "eegrc/evaluate.hpp"
#include "eegrc/features.hpp"
#include "eegrc/parallel.hpp"
#include "eegrc/random.hpp"
#include "eegrc/session_io.hpp"
#include "eegrc/signal.hpp"
#include "eegrc/synth.hpp"
#include "svg_plot.hpp"

namespace eegrc::cli {

using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return 2;
    case ErrorKind::kLeakage: return 4;
    default: return 3;
  }
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

void make_dir(const fs::path& dir) {
  if (dir.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

RoiMap roi_map_from(const fs::path& path) {
  RoiMap rois = path.empty() ? RoiMap::defaults() : RoiMap::load(path);
  return rois;
}

std::vector<Sentence> load_sentences(const fs::path& table) {
  const auto words = read_feature_table(table);
  if (words.empty()) throw DataError("feature table " + table.string() + " is empty");
  return build_sentences(words);
}

int longest(const std::vector<Sentence>& sentences) {
  Eigen::Index n = 0;
  for (const auto& s : sentences) n = std::max(n, s.length());
  return static_cast<int>(n);
}

uercm::ModelConfig model_config(const ModelArgs& m, std::uint64_t seed,
                                const std::vector<Sentence>& sentences) {
  uercm::ModelConfig c;
  c.hidden = m.hidden;
  c.heads = m.heads;
  c.lr = m.lr;
  c.batch_size = m.batch_size;
  c.patience = m.patience;
  c.max_epochs = m.max_epochs;
  c.t_max = m.t_max > 0 ? m.t_max : longest(sentences);
  c.seed = seed;
  c.validate();
  return c;
}

json model_args_json(const ModelArgs& m) {
  return {{"hidden", m.hidden},         {"heads", m.heads},       {"lr", m.lr},
          {"batch_size", m.batch_size}, {"patience", m.patience}, {"max_epochs", m.max_epochs},
          {"t_max", m.t_max},           {"holdout", m.holdout}};
}

}  // namespace

void write_run_lock(const fs::path& dir, const std::string& command, const json& config) {
  write_json(dir / "run.lock",
             {{"tool", "eegrc"}, {"version", library_version()}, {"command", command}, {"config", config}});
}

std::vector<fs::path> find_manifest_dirs(const fs::path& dir) {
  if (fs::exists(dir / "manifest")) return {dir};
  if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no session or epoch archive found under " + dir.string());
  return out;
}

// ---------------------------------------------------------------- synth

void run_synth(const SynthArgs& a) {
  make_dir(a.out);
  CohortSpec spec;
  spec.n_participants = a.participants;
  spec.n_trials = a.trials;
  spec.words_per_sentence = a.words;
  spec.seed = a.seed;
  spec.gain_jitter = a.jitter;
  spec.effects = EffectSpec::defaults().with_effects_scaled(a.effect_scale);
  spec.effects.noise_sigma_uv = a.noise_uv;
  spec.effects.artifact_rate = a.artifact_rate;
  if (a.participants < 1) throw ConfigError("--participants must be at least 1");

  auto emit = [&](SyntheticSession&& s) {
    const fs::path dir = a.out / s.recording.participant_id;
    write_session(s.recording, dir);
    write_truth(s.truth, s.recording.participant_id, (dir / "truth.csv").string());
    std::size_t artifacts = 0;
    for (const auto& t : s.truth) artifacts += t.artifact ? 1 : 0;
    std::cerr << "synth: " << s.recording.participant_id << " " << s.truth.size() << " words, "
              << artifacts << " artifacts\n";
  };
  generate_cohort(spec, emit);
  write_run_lock(a.out, "synth",
                 {{"participants", a.participants},
                  {"trials", a.trials},
                  {"words", a.words},
                  {"seed", a.seed},
                  {"effect_scale", a.effect_scale},
                  {"noise_uv", a.noise_uv},
                  {"artifact_rate", a.artifact_rate},
                  {"jitter", a.jitter},
                  {"rate_hz", kSynthRateHz}});
}

// ----------------------------------------------------------- preprocess

void run_preprocess(const PreprocessArgs& a) {
  make_dir(a.out);
  PreprocessOptions opt;
  opt.threshold_uv = a.threshold_uv;
  opt.target_hz = a.target_hz;
  opt.low_hz = a.low_hz;
  opt.high_hz = a.high_hz;

  auto summary = open_out(a.out / "summary.csv");
  summary << "participant_id,kept,rejected,skipped\n";
  for (const auto& dir : find_manifest_dirs(a.in)) {
    const PreprocessResult r = preprocess_session(read_session(dir), opt);
    const std::string pid =
        !r.epochs.empty() ? r.epochs.front().label.participant_id
                          : (!r.rejected.empty() ? r.rejected.front().label.participant_id
                                                 : dir.filename().string());
    const fs::path out_dir = a.out / pid;
    write_epoch_archive(r.epochs, out_dir);
    write_rejection_report(r, out_dir / "rejections.csv");
    summary << pid << ',' << r.epochs.size() << ',' << r.rejected.size() << ',' << r.skipped.size()
            << '\n';
    std::cerr << "preprocess: " << pid << " kept " << r.epochs.size() << ", rejected "
              << r.rejected.size() << ", skipped " << r.skipped.size() << '\n';
  }
  write_run_lock(a.out, "preprocess",
                 {{"in", a.in.string()},
                  {"threshold_uv", a.threshold_uv},
                  {"target_hz", a.target_hz},
                  {"low_hz", a.low_hz},
                  {"high_hz", a.high_hz},
                  {"span_ms", {kEpochSpan.start_ms, kEpochSpan.end_ms}},
                  {"baseline_ms", {kBaselineWindow.start_ms, kBaselineWindow.end_ms}},
                  {"filter", "butterworth order 4, zero-phase"}});
}

// ------------------------------------------------------------------ erp

namespace {

void write_waveform_csv(const fs::path& path, const ConditionWaveform& w) {
  auto f = open_out(path);
  f << "time_ms";
  for (const auto& c : w.channel_names) f << ',' << c;
  f << '\n';
  for (Eigen::Index i = 0; i < w.data.cols(); ++i) {
    f << format_double(w.time_ms(i));
    for (Eigen::Index c = 0; c < w.data.rows(); ++c) f << ',' << format_double(w.data(c, i));
    f << '\n';
  }
}

json window_json(const TimeWindows& w) {
  auto span = [](TimeSpan s) { return json::array({s.start_ms, s.end_ms}); };
  return {{"n100", span(w.n100)}, {"p200", span(w.p200)}, {"n400", span(w.n400)}, {"p600", span(w.p600)}};
}

json test_json(const ComponentTest& t) {
  json pairs = json::array();
  for (std::size_t k = 0; k < t.anova.pairwise.size(); ++k) {
    const auto& p = t.anova.pairwise[k];
    json pj = {{"a", to_string(kConditionOrder[static_cast<std::size_t>(p.a)])},
               {"b", to_string(kConditionOrder[static_cast<std::size_t>(p.b)])},
               {"t", num(p.t)},
               {"df", p.df},
               {"p_raw", num(p.p_raw)},
               {"p_bonferroni", num(p.p_adjusted)}};
    if (k < t.permutation_p.size()) pj["p_permutation"] = t.permutation_p[k];
    pairs.push_back(pj);
  }
  json means = json::object();
  for (std::size_t c = 0; c < kConditionOrder.size(); ++c) {
    means[std::string(to_string(kConditionOrder[c]))] = t.means(static_cast<Eigen::Index>(c));
  }
  return {{"measure", to_string(t.measure)},
          {"region", t.region},
          {"participants", t.participants.size()},
          {"means_uv", means},
          {"f", num(t.anova.f_value)},
          {"df", {t.anova.df_between, t.anova.df_within}},
          {"p", t.anova.p_value},
          {"df_uncorrected", {t.anova.df_between_uncorrected, t.anova.df_within_uncorrected}},
          {"p_uncorrected", t.anova.p_uncorrected},
          {"gg_epsilon", t.anova.gg_epsilon},
          {"gg_corrected", t.anova.corrected},
          {"pairwise", pairs}};
}

}  // namespace

void run_erp(const ErpArgs& a) {
  make_dir(a.out);
  const RoiMap rois = roi_map_from(a.roi_map);
  std::vector<ParticipantErp> cohort;
  std::vector<std::string> warnings;
  for (const auto& dir : find_manifest_dirs(a.in)) {
    const auto epochs = read_epoch_archive(dir);
    if (epochs.empty()) {
      warnings.push_back(dir.filename().string() + ": no epochs");
      continue;
    }
    std::vector<std::string> w;
    ParticipantErp p{epochs.front().label.participant_id, grand_average(epochs, &w)};
    for (auto& s : w) warnings.push_back(p.participant_id + ": " + s);
    cohort.push_back(std::move(p));
  }
  if (cohort.empty()) throw DataError("no epochs to average under " + a.in.string());
  rois.check_against(cohort.front().conditions.front().channel_names);

  for (WordType t : kConditionOrder) {
    try {
      write_waveform_csv(a.out / ("waveform_" + std::string(to_string(t)) + ".csv"),
                         cohort_condition(cohort, t));
    } catch (const DataError& e) {
      warnings.push_back(e.what());
    }
  }

  const ConditionWaveform all = cohort_average(cohort);
  const GfpSeries gfp = global_field_power(all);
  const SegmentationOptions seg;
  const auto smooth = moving_average(
      gfp.values, std::max<std::size_t>(
                      1, static_cast<std::size_t>(std::llround(seg.smoothing_ms / gfp.step_ms)) | 1u));
  {
    auto f = open_out(a.out / "gfp.csv");
    f << "time_ms,gfp_uv,gfp_smoothed_uv\n";
    for (std::size_t i = 0; i < gfp.values.size(); ++i) {
      f << format_double(gfp.time_ms(i)) << ',' << format_double(gfp.values[i]) << ','
        << format_double(smooth[i]) << '\n';
    }
  }
  const TimeWindows windows = segment_time_windows(gfp, seg);
  write_json(a.out / "windows.json", window_json(windows));

  // ROI waveform plots and topography
  for (const auto& [region, electrodes] : rois.regions()) {
    std::vector<Series> series;
    for (WordType t : kConditionOrder) {
      try {
        const ConditionWaveform w = cohort_condition(cohort, t);
        const Eigen::VectorXd y = roi_waveform(w, region, rois);
        Series s{std::string(to_string(t)), {}, {}};
        for (Eigen::Index i = 0; i < y.size(); ++i) {
          s.x.push_back(w.time_ms(i));
          s.y.push_back(y(i));
        }
        series.push_back(std::move(s));
      } catch (const DataError&) {
      }
    }
    open_out(a.out / ("roi_" + region + ".svg"))
        << line_plot_svg(region + " ROI grand average", "time (ms)", "voltage (uV)", series);
  }
  {
    auto f = open_out(a.out / "topography.csv");
    f << "condition,window,electrode,mean_uv\n";
    const std::pair<const char*, TimeSpan> spans[] = {
        {"n100", windows.n100}, {"p200", windows.p200}, {"n400", windows.n400}, {"p600", windows.p600}};
    for (WordType t : kConditionOrder) {
      ConditionWaveform w;
      try {
        w = cohort_condition(cohort, t);
      } catch (const DataError&) {
        continue;
      }
      for (const auto& [name, span] : spans) {
        const Eigen::VectorXd m = channel_window_means(w, span);
        for (Eigen::Index c = 0; c < m.size(); ++c) {
          f << to_string(t) << ',' << name << ',' << w.channel_names[static_cast<std::size_t>(c)]
            << ',' << format_double(m(c)) << '\n';
        }
      }
    }
  }

  json tests = json::array();
  if (cohort.size() >= 2) {
    std::uint64_t k = 0;
    for (ComponentMeasure m :
         {ComponentMeasure::kN100P200, ComponentMeasure::kN400, ComponentMeasure::kP600}) {
      for (const auto& [region, electrodes] : rois.regions()) {
        try {
          tests.push_back(test_json(component_test(cohort, m, region, windows, rois, a.n_perm,
                                                   derive_seed(a.seed, k++))));
        } catch (const DataError& e) {
          warnings.push_back(std::string(to_string(m)) + "/" + region + ": " + e.what());
        }
      }
    }
  } else {
    warnings.push_back("repeated-measures tests need at least 2 participants");
  }
  write_json(a.out / "anova.json", {{"conditions", {"answer", "semantic_related", "ordinary"}},
                                    {"participants", cohort.size()},
                                    {"windows", window_json(windows)},
                                    {"tests", tests},
                                    {"warnings", warnings}});
  for (const auto& w : warnings) std::cerr << "erp: warning: " << w << '\n';
  write_run_lock(a.out, "erp",
                 {{"in", a.in.string()},
                  {"roi_map", a.roi_map.string()},
                  {"n_perm", a.n_perm},
                  {"seed", a.seed},
                  {"smoothing_ms", seg.smoothing_ms},
                  {"snap_radius_ms", seg.snap_radius_ms},
                  {"gg_threshold", 0.95}});
}

// ------------------------------------------------------------- features

void run_features(const FeaturesArgs& a) {
  make_dir(a.out);
  const RoiMap rois = roi_map_from(a.roi_map);
  std::vector<WordFeatureVector> rows;
  for (const auto& dir : find_manifest_dirs(a.in)) {
    const auto epochs = read_epoch_archive(dir);
    std::vector<WordFeatureVector> part(epochs.size());
    parallel_for(epochs.size(), [&](std::size_t i) { part[i] = word_feature_vector(epochs[i], rois); });
    rows.insert(rows.end(), part.begin(), part.end());
    std::cerr << "features: " << dir.filename().string() << " " << part.size() << " words\n";
  }
  write_feature_table(rows, a.out / "features.csv");
  write_run_lock(a.out, "features",
                 {{"in", a.in.string()}, {"roi_map", a.roi_map.string()}, {"dimensions", kFeatureDim}});
}

// ---------------------------------------------------------------- train

void run_train(const TrainArgs& a) {
  make_dir(a.out);
  const uercm::Task task = uercm::parse_task(a.task);
  const auto raw = load_sentences(a.features);
  const uercm::ModelConfig config = model_config(a.model, a.seed, raw);
  const FeatureScaler scaler = FeatureScaler::fit(sentence_words(raw));
  const auto sentences = scale_sentences(raw, scaler);
  const uercm::TrainResult r = train_with_holdout(sentences, config, task, a.model.holdout);

  uercm::save_checkpoint(a.out / "model.uercm", {config, r.params, std::string(uercm::to_string(task))});
  write_json(a.out / "scaler.json",
             {{"names", feature_names()}, {"mean", scaler.mean()}, {"std", scaler.stddev()}});
  {
    auto f = open_out(a.out / "history.csv");
    f << "epoch,train_loss,validation_auc\n";
    for (std::size_t e = 0; e < r.history.train_loss.size(); ++e) {
      f << e << ',' << format_double(r.history.train_loss[e]) << ','
        << format_double(r.history.validation_auc[e]) << '\n';
    }
  }
  std::cerr << "train: " << r.history.train_loss.size() << " epochs, best epoch "
            << r.history.best_epoch << '\n';
  json cfg = model_args_json(a.model);
  cfg["t_max"] = config.t_max;
  write_run_lock(a.out, "train",
                 {{"features", a.features.string()},
                  {"task", uercm::to_string(task)},
                  {"seed", a.seed},
                  {"model", cfg},
                  {"best_epoch", r.history.best_epoch},
                  {"stopped_early", r.history.stopped_early}});
}

// ------------------------------------------------------------- evaluate

void run_evaluate(const EvaluateArgs& a) {
  make_dir(a.out);
  const uercm::Task task = uercm::parse_task(a.task);
  const Scheme scheme = parse_scheme(a.scheme);
  const auto sentences = load_sentences(a.features);
  uercm::ModelConfig config = model_config(a.model, a.seed, sentences);

  json grid_json = nullptr;
  if (a.grid) {
    if (a.model_name != "uercm") throw ConfigError("--grid applies to the uercm model only");
    std::map<std::string, SplitPlan> plans;
    for (Scheme s : {Scheme::kCvot, Scheme::kLopo}) {
      plans[std::string(to_string(s))] = make_plan(sentences, s, a.folds, a.seed);
    }
    const auto result = uercm::grid_search(
        config, {}, {"cvot", "lopo"}, [&](const uercm::ModelConfig& c, std::string_view s) {
          EvalOptions o{task, a.seed, 1, 0};
          return evaluate(sentences, plans.at(std::string(s)), UercmScorer(c, a.model.holdout), o).auc;
        });
    config = result.best;
    grid_json = json::array();
    for (const auto& e : result.entries) {
      grid_json.push_back({{"hidden", e.config.hidden},
                           {"heads", e.config.heads},
                           {"lr", e.config.lr},
                           {"auc_cvot", e.scheme_scores[0]},
                           {"auc_lopo", e.scheme_scores[1]},
                           {"mean_auc", e.mean_score}});
    }
    write_json(a.out / "grid.json", {{"entries", grid_json},
                                     {"best", {{"hidden", config.hidden},
                                               {"heads", config.heads},
                                               {"lr", config.lr}}}});
  }

  std::unique_ptr<SentenceScorer> scorer;
  if (a.model_name == "uercm") {
    scorer = std::make_unique<UercmScorer>(config, a.model.holdout);
  } else if (a.model_name == "untrained") {
    scorer = std::make_unique<UntrainedScorer>();
  } else if (a.model_name == "logistic") {
    scorer = std::make_unique<LogisticScorer>();
  } else {
    throw ConfigError("unknown model '" + a.model_name + "' (expected uercm, untrained or logistic)");
  }

  const SplitPlan plan = a.plan.empty() ? make_plan(sentences, scheme, a.folds, a.seed) : load_plan(a.plan);
  save_plan(a.out / "plan.json", plan);
  const EvalReport report = evaluate(sentences, plan, *scorer, {task, a.seed, a.baseline_draws, 0});
  write_json(a.out / "report.json", report_json(report));
  write_fold_csv(a.out / "folds.csv", report);
  write_word_scores(a.out / "word_scores.csv", report);
  write_sentence_scores(a.out / "sentence_scores.csv", report);
  std::cerr << "evaluate: " << report.task << "/" << report.scheme << " " << report.model
            << " auc " << report.auc << " (delta " << report.delta_auc << ")";
  if (task == uercm::Task::kSentence) {
    std::cerr << " map " << report.map << " (delta " << report.delta_map << ")";
  }
  std::cerr << '\n';

  json model = model_args_json(a.model);
  model["hidden"] = config.hidden;
  model["heads"] = config.heads;
  model["lr"] = config.lr;
  model["t_max"] = config.t_max;
  write_run_lock(a.out, "evaluate",
                 {{"features", a.features.string()},
                  {"task", uercm::to_string(task)},
                  {"scheme", to_string(scheme)},
                  {"model_name", a.model_name},
                  {"folds", a.folds},
                  {"seed", a.seed},
                  {"baseline_draws", a.baseline_draws},
                  {"grid", a.grid},
                  {"model", model}});
}

// --------------------------------------------------------------- report

void run_report(const ReportArgs& a) {
  make_dir(a.out);
  if (a.runs.empty()) throw ConfigError("report needs at least one --runs directory");
  std::vector<json> reports;
  for (const auto& dir : a.runs) {
    const fs::path path = fs::is_directory(dir) ? dir / "report.json" : dir;
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path.string());
    json j;
    try {
      f >> j;
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    j.erase("folds");
    reports.push_back(std::move(j));
  }
  std::sort(reports.begin(), reports.end(), [](const json& x, const json& y) {
    auto key = [](const json& r) {
      return std::make_tuple(r.value("model", ""), r.value("task", ""), r.value("scheme", ""));
    };
    return key(x) < key(y);
  });

  auto cell = [](const json& v) {
    return v.is_number() ? format_double(std::round(v.get<double>() * 1000.0) / 1000.0) : std::string("-");
  };
  {
    auto f = open_out(a.out / "summary.csv");
    f << "model,task,scheme,auc,baseline_auc,delta_auc,map,baseline_map,delta_map\n";
    for (const auto& r : reports) {
      auto raw = [](const json& v) { return v.is_number() ? format_double(v.get<double>()) : std::string(); };
      f << r["model"].get<std::string>() << ',' << r["task"].get<std::string>() << ','
        << r["scheme"].get<std::string>() << ',' << raw(r["auc"]) << ',' << raw(r["baseline_auc"])
        << ',' << raw(r["delta_auc"]) << ',' << raw(r["map"]) << ',' << raw(r["baseline_map"])
        << ',' << raw(r["delta_map"]) << '\n';
    }
  }
  // one row per model, delta columns per task and scheme
  std::map<std::string, std::map<std::string, std::string>> table;
  for (const auto& r : reports) {
    const std::string key = r["task"].get<std::string>() + "/" + r["scheme"].get<std::string>();
    auto& row = table[r["model"].get<std::string>()];
    row["dAUC " + key] = cell(r["delta_auc"]);
    if (r["task"] == "sentence_classification") row["dMAP " + key] = cell(r["delta_map"]);
  }
  const std::vector<std::string> columns = {
      "dAUC answer_extraction/cvot",       "dAUC answer_extraction/lopo",
      "dAUC sentence_classification/cvot", "dMAP sentence_classification/cvot",
      "dAUC sentence_classification/lopo", "dMAP sentence_classification/lopo"};
  auto f = open_out(a.out / "table.md");
  f << "| model |";
  for (const auto& c : columns) f << ' ' << c << " |";
  f << "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) f << "---|";
  f << '\n';
  for (const auto& [model, row] : table) {
    f << "| " << model << " |";
    for (const auto& c : columns) {
      const auto it = row.find(c);
      f << ' ' << (it == row.end() ? "-" : it->second) << " |";
    }
    f << '\n';
  }
  json runs = json::array();
  for (const auto& r : a.runs) runs.push_back(r.string());
  write_run_lock(a.out, "report", {{"runs", runs}});
}

}  // namespace eegrc::cli
