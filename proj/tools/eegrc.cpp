// eegrc: command-line front end over eegrc_core.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "eegrc/types.hpp"

namespace {

using namespace eegrc::cli;

void add_model_options(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--hidden", m.hidden, "hidden size h")->capture_default_str();
  cmd->add_option("--heads", m.heads, "attention heads")->capture_default_str();
  cmd->add_option("--lr", m.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch-size", m.batch_size)->capture_default_str();
  cmd->add_option("--patience", m.patience, "early-stopping patience (epochs)")->capture_default_str();
  cmd->add_option("--max-epochs", m.max_epochs)->capture_default_str();
  cmd->add_option("--t-max", m.t_max, "padded sentence length; 0 = longest sentence")
      ->capture_default_str();
  cmd->add_option("--holdout", m.holdout, "fraction of training questions used for early stopping")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG reading-comprehension toolkit"};
  app.set_version_flag("--version", std::string(eegrc::library_version()));
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "generate synthetic sessions with known effects");
  c_synth->add_option("--out", synth.out)->required();
  c_synth->add_option("--participants", synth.participants)->capture_default_str();
  c_synth->add_option("--trials", synth.trials, "sentences per participant")->capture_default_str();
  c_synth->add_option("--words", synth.words, "mean words per sentence")->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();
  c_synth->add_option("--effect-scale", synth.effect_scale, "multiplier on word-type effects")
      ->capture_default_str();
  c_synth->add_option("--noise-uv", synth.noise_uv)->capture_default_str();
  c_synth->add_option("--artifact-rate", synth.artifact_rate)->capture_default_str();
  c_synth->add_option("--gain-jitter", synth.jitter)->capture_default_str();

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "re-reference, filter, epoch and screen sessions");
  c_pre->add_option("--in", pre.in, "session directory or a directory of sessions")->required();
  c_pre->add_option("--out", pre.out)->required();
  c_pre->add_option("--threshold-uv", pre.threshold_uv)->capture_default_str();
  c_pre->add_option("--target-hz", pre.target_hz)->capture_default_str();
  c_pre->add_option("--low-hz", pre.low_hz)->capture_default_str();
  c_pre->add_option("--high-hz", pre.high_hz)->capture_default_str();

  ErpArgs erp;
  auto* c_erp = app.add_subcommand("erp", "grand averages, time windows and component statistics");
  c_erp->add_option("--in", erp.in, "epoch archive or a directory of archives")->required();
  c_erp->add_option("--out", erp.out)->required();
  c_erp->add_option("--roi-map", erp.roi_map, "JSON region -> electrodes");
  c_erp->add_option("--n-perm", erp.n_perm, "sign-flip permutations; 0 disables")->capture_default_str();
  c_erp->add_option("--seed", erp.seed)->capture_default_str();

  FeaturesArgs feat;
  auto* c_feat = app.add_subcommand("features", "69-dimensional word feature table");
  c_feat->add_option("--in", feat.in)->required();
  c_feat->add_option("--out", feat.out)->required();
  c_feat->add_option("--roi-map", feat.roi_map);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "fit UERCM on a feature table");
  c_train->add_option("--features", train.features)->required();
  c_train->add_option("--out", train.out)->required();
  c_train->add_option("--task", train.task, "token | sentence")->capture_default_str();
  c_train->add_option("--seed", train.seed)->capture_default_str();
  add_model_options(c_train, train.model);

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "cross-validated evaluation against the untrained reference");
  c_ev->add_option("--features", ev.features)->required();
  c_ev->add_option("--out", ev.out)->required();
  c_ev->add_option("--task", ev.task, "token | sentence")->capture_default_str();
  c_ev->add_option("--scheme", ev.scheme, "cvot | lopo")->capture_default_str();
  c_ev->add_option("--model", ev.model_name, "uercm | untrained | logistic")->capture_default_str();
  c_ev->add_option("--folds", ev.folds, "CVOT folds")->capture_default_str();
  c_ev->add_option("--seed", ev.seed)->capture_default_str();
  c_ev->add_option("--baseline-draws", ev.baseline_draws)->capture_default_str();
  c_ev->add_flag("--grid", ev.grid, "select hidden/heads/lr by grid search first");
  c_ev->add_option("--plan", ev.plan, "split plan JSON from an earlier run; overrides --scheme/--folds");
  add_model_options(c_ev, ev.model);

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "collect evaluation runs into one table");
  c_rep->add_option("--runs", rep.runs, "evaluate output directories")->required();
  c_rep->add_option("--out", rep.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*c_synth) run_synth(synth);
    else if (*c_pre) run_preprocess(pre);
    else if (*c_erp) run_erp(erp);
    else if (*c_feat) run_features(feat);
    else if (*c_train) run_train(train);
    else if (*c_ev) run_evaluate(ev);
    else if (*c_rep) run_report(rep);
  } catch (const eegrc::Error& e) {
    std::cerr << "eegrc:error:" << eegrc::to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "eegrc:error:data: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
