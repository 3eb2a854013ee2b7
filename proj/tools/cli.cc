// Copyright 2026 The liftseg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "liftseg/detect.h"
#include "liftseg/error.h"
#include "liftseg/eval.h"
#include "liftseg/gradcheck.h"
#include "liftseg/instance.h"
#include "liftseg/scene_io.h"
#include "liftseg/synth.h"
#include "liftseg/train.h"
#include "liftseg/vote.h"
#include "liftseg/weightnet.h"

namespace liftseg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool json = false;
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  if (!f.flush()) throw IoError("failed writing " + path);
}

detect::MembershipMode ParseMode(const std::string& s) {
  return s == "mask" ? detect::MembershipMode::kMask : detect::MembershipMode::kBox;
}

std::string Child(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

train::Object LoadObjectDir(const std::string& dir, detect::MembershipMode mode, int threads) {
  if (!fs::is_directory(dir)) throw IoError("object directory " + dir + " does not exist");
  geom::Scene scene = geom::LoadScene(Child(dir, "cloud.txt"), Child(dir, "labels.json"));
  geom::ViewSet views = geom::ReadViewSet(Child(dir, "cameras.json"));
  views.options.threads = threads;
  const std::string vis_path = Child(dir, "visibility.txt");
  geom::VisibilityMap vis = fs::exists(vis_path)
                                ? geom::ReadVisibility(vis_path)
                                : geom::ComputeVisibility(scene.cloud, views.cameras, views.options);
  detect::DetectionSet dets = detect::LoadDetections(Child(dir, "detections.json"));
  if (dets.num_views != static_cast<int>(views.cameras.size())) {
    throw Error(dir + ": detections declare K=" + std::to_string(dets.num_views) + " but " +
                std::to_string(views.cameras.size()) + " cameras are defined");
  }
  return train::MakeObject(std::move(scene), std::move(views.cameras), std::move(vis),
                           std::move(dets), mode, threads);
}

// Subdirectories holding a cloud file, sorted by name; the directory itself
// when it is an object.
std::vector<std::string> ObjectDirs(const std::string& root) {
  if (!fs::is_directory(root)) throw IoError("objects directory " + root + " does not exist");
  if (fs::exists(Child(root, "cloud.txt"))) return {root};
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "cloud.txt")) {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error("no objects (directories with cloud.txt) under " + root);
  return out;
}

std::vector<train::Object> LoadObjects(const std::string& root, detect::MembershipMode mode,
                                       int threads) {
  std::vector<train::Object> out;
  for (const auto& d : ObjectDirs(root)) out.push_back(LoadObjectDir(d, mode, threads));
  return out;
}

struct InstanceOptions {
  std::string out;
  double radius = 0.0;
  double inclusion = instance::kDefaultInclusionThreshold;
  std::string scope = "own";
};

void AddInstanceFlags(CLI::App* cmd, InstanceOptions& o) {
  cmd->add_option("--instances-out", o.out, "Write merged instances to this file");
  cmd->add_option("--adjacency-radius", o.radius,
                  "Super-point adjacency radius (default: 2x mean nearest-neighbor distance)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--inclusion-threshold", o.inclusion,
                  "Fraction of visible points inside a detection for inclusion")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--inclusion-scope", o.scope,
                  "Detections that can split a part: own (same label) or all")
      ->check(CLI::IsMember({"own", "all"}));
}

int WriteInstanceOutput(const InstanceOptions& o, const train::Object& obj,
                        const vote::Labeling& labels, const vote::ScoreMatrix& scores) {
  const double radius = o.radius > 0.0 ? o.radius : instance::DefaultAdjacencyRadius(obj.scene.cloud);
  const auto adj = instance::SuperpointAdjacency(obj.scene.cloud, obj.scene.partition, radius);
  auto patterns = instance::ComputeInclusion(obj.inputs(), o.inclusion);
  if (o.scope == "own") {
    instance::RestrictToOwnLabel(obj.detections, labels.superpoint_labels, &patterns);
  }
  auto seg = instance::MergeInstances(labels.superpoint_labels, adj, patterns);
  instance::AssignScores(scores, &seg);
  instance::WriteInstances(o.out, instance::ToFile(seg, obj.scene.partition));
  return seg.num_instances();
}

json LabelingSummary(const vote::Labeling& labels) {
  const auto null_count = std::count(labels.point_labels.begin(), labels.point_labels.end(),
                                     vote::kNullLabel);
  return {{"points", labels.point_labels.size()},
          {"labeled", labels.point_labels.size() - static_cast<std::size_t>(null_count)},
          {"null", null_count},
          {"superpoints", labels.superpoint_labels.size()}};
}

void Report(const Globals& g, std::ostream& out, const json& j, const std::string& human) {
  if (g.json) {
    out << j.dump(2) << "\n";
  } else {
    out << human;
  }
}

std::string ErrorKind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const Error*>(&e)) return "runtime";
  return "internal";
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Globals g;
  CLI::App app{"liftseg: lift multi-view 2D part detections to 3D point cloud segmentation",
               "liftseg"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "liftseg 0.1.0");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed for generation and training");
  app.add_option("--threads", g.threads, "Worker threads for per-view work")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "Machine-readable output and errors");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic object bundle");
  std::string spec_path, preset, synth_out;
  int count = 1;
  synth_cmd->add_option("--spec", spec_path, "Spec file (key = value text)")->check(CLI::ExistingFile);
  synth_cmd->add_option("--preset", preset, "Built-in shape: chair, lamp or table");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--count", count, "Number of objects; seeds are seed, seed+1, ...")
      ->check(CLI::PositiveNumber);

  // visibility
  auto* vis_cmd = app.add_subcommand("visibility", "Compute per-view point visibility");
  std::string vis_cloud, vis_out, vis_cameras_out;
  int views = 10, res = geom::Camera::kDefaultResolution;
  double distance = geom::Camera::kDefaultDistance, splat = 2.0, depth_eps = 0.01;
  vis_cmd->add_option("--cloud", vis_cloud, "Cloud file")->required()->check(CLI::ExistingFile);
  vis_cmd->add_option("--views", views, "Number of viewpoints")->check(CLI::PositiveNumber);
  vis_cmd->add_option("--distance", distance, "Camera distance from the origin");
  vis_cmd->add_option("--res", res, "Image width and height in pixels")->check(CLI::PositiveNumber);
  vis_cmd->add_option("--splat-radius", splat, "Splat disk radius in pixels")
      ->check(CLI::NonNegativeNumber);
  vis_cmd->add_option("--depth-eps", depth_eps, "Depth tolerance")->check(CLI::NonNegativeNumber);
  vis_cmd->add_option("--out", vis_out, "Visibility output file")->required();
  vis_cmd->add_option("--cameras-out", vis_cameras_out, "Also write the camera set");

  // lift
  auto* lift_cmd = app.add_subcommand("lift", "Unweighted voting and labeling");
  std::string lift_obj, lift_out, lift_scores, lift_mode = "box";
  double null_threshold = vote::kDefaultNullThreshold;
  InstanceOptions lift_inst;
  lift_cmd->add_option("--object", lift_obj, "Object directory")->required();
  lift_cmd->add_option("--null-threshold", null_threshold, "Minimum score for a label");
  lift_cmd->add_option("--mode", lift_mode, "Membership from boxes or masks")
      ->check(CLI::IsMember({"box", "mask"}));
  lift_cmd->add_option("--out", lift_out, "Labeling output file")->required();
  lift_cmd->add_option("--scores-out", lift_scores, "Score table output file");
  AddInstanceFlags(lift_cmd, lift_inst);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the detection weight network");
  std::string train_objs, val_objs, train_cfg, ckpt_out, report_out, train_mode = "box";
  bool report_timing = false;
  train::TrainConfig flags_cfg;
  std::string optimizer_name, loss_name;
  train_cmd->add_option("--objects", train_objs, "Directory of training objects")->required();
  train_cmd->add_option("--validation", val_objs, "Directory of validation objects");
  train_cmd->add_option("--config", train_cfg, "Config file (key = value text)")
      ->check(CLI::ExistingFile);
  auto* o_epochs = train_cmd->add_option("--epochs", flags_cfg.epochs, "Training epochs");
  auto* o_lr = train_cmd->add_option("--lr", flags_cfg.learning_rate, "Learning rate");
  auto* o_opt = train_cmd->add_option("--optimizer", optimizer_name, "sgd or adam")
                    ->check(CLI::IsMember({"sgd", "adam"}));
  auto* o_loss = train_cmd->add_option("--loss", loss_name, "mriou, cross_entropy or both")
                     ->check(CLI::IsMember({"mriou", "cross_entropy", "both"}));
  auto* o_mix = train_cmd->add_option("--mix", flags_cfg.mix, "Cross-entropy share for --loss both");
  auto* o_tau = train_cmd->add_option("--tau", flags_cfg.tau, "Weight offset");
  auto* o_freq = train_cmd->add_option("--frequencies", flags_cfg.frequencies,
                                       "Positional encoding frequencies");
  auto* o_hidden = train_cmd->add_option("--hidden", flags_cfg.hidden, "Hidden width");
  auto* o_null = train_cmd->add_option("--null-score-init", flags_cfg.null_score_init,
                                       "Initial null logit");
  auto* o_std = train_cmd->add_option("--init-std", flags_cfg.init_std, "Initial parameter std");
  train_cmd->add_option("--mode", train_mode, "Membership from boxes or masks")
      ->check(CLI::IsMember({"box", "mask"}));
  train_cmd->add_option("--checkpoint-out", ckpt_out, "Checkpoint output file")->required();
  train_cmd->add_option("--report-out", report_out, "Training report output file");
  train_cmd->add_flag("--report-timing", report_timing, "Include wall time in the report");

  // lift-weighted
  auto* lw_cmd = app.add_subcommand("lift-weighted", "Weighted voting with a trained network");
  std::string lw_ckpt, lw_obj, lw_out, lw_scores, lw_mode = "box";
  InstanceOptions lw_inst;
  lw_cmd->add_option("--checkpoint", lw_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  lw_cmd->add_option("--object", lw_obj, "Object directory")->required();
  lw_cmd->add_option("--mode", lw_mode, "Membership from boxes or masks")
      ->check(CLI::IsMember({"box", "mask"}));
  lw_cmd->add_option("--out", lw_out, "Labeling output file")->required();
  lw_cmd->add_option("--scores-out", lw_scores, "Score table output file");
  AddInstanceFlags(lw_cmd, lw_inst);

  // eval-sem
  auto* es_cmd = app.add_subcommand("eval-sem", "Semantic mIoU of labelings against ground truth");
  std::vector<std::string> es_objs, es_labels;
  std::string es_out;
  es_cmd->add_option("--object", es_objs, "Object directory (repeatable)")->required();
  es_cmd->add_option("--labeling", es_labels, "Labeling file per object (repeatable)")->required();
  es_cmd->add_option("--out", es_out, "Write the JSON report here");

  // eval-inst
  auto* ei_cmd = app.add_subcommand("eval-inst", "Instance mAP50 against ground truth");
  std::vector<std::string> ei_objs, ei_insts;
  std::string ei_out;
  ei_cmd->add_option("--object", ei_objs, "Object directory with instances.txt (repeatable)")
      ->required();
  ei_cmd->add_option("--instances", ei_insts, "Predicted instance file per object (repeatable)")
      ->required();
  ei_cmd->add_option("--out", ei_out, "Write the JSON report here");

  // baseline-conf
  auto* bc_cmd = app.add_subcommand("baseline-conf", "Detection confidences used as weights");
  std::string bc_objs, bc_mode = "both", bc_det_mode = "box", bc_out;
  double bc_tau = weightnet::kDefaultTau, bc_null = weightnet::kDefaultNullScore;
  bc_cmd->add_option("--objects", bc_objs, "Directory of objects")->required();
  bc_cmd->add_option("--weights", bc_mode, "raw, normalized or both")
      ->check(CLI::IsMember({"raw", "normalized", "both"}));
  bc_cmd->add_option("--mode", bc_det_mode, "Membership from boxes or masks")
      ->check(CLI::IsMember({"box", "mask"}));
  bc_cmd->add_option("--tau", bc_tau, "Per-detection weight target for normalization");
  bc_cmd->add_option("--null-score", bc_null, "Null logit");
  bc_cmd->add_option("--out", bc_out, "Write the JSON report here");

  // gradcheck
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck::Options gc;
  gc_cmd->add_option("--instances", gc.instances, "Random instances per suite")
      ->check(CLI::PositiveNumber);
  gc_cmd->add_option("--hidden", gc.hidden, "Hidden width of the checked network")
      ->check(CLI::PositiveNumber);
  gc_cmd->add_option("--frequencies", gc.frequencies, "Positional encoding frequencies")
      ->check(CLI::NonNegativeNumber);
  gc_cmd->add_option("--step", gc.step, "Central difference step")->check(CLI::PositiveNumber);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    if (g.json) {
      err << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
    } else {
      err << e.what() << "\n\n" << app.help();
    }
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (synth_cmd->parsed()) {
      if (spec_path.empty() == preset.empty()) {
        throw CLI::ValidationError("synth", "exactly one of --spec and --preset is required");
      }
      synth::SynthSpec spec = spec_path.empty() ? synth::Preset(preset)
                                                : synth::LoadSynthSpec(spec_path);
      if (g.seed) spec.seed = *g.seed;
      json written = json::array();
      const std::uint64_t base = spec.seed;
      for (int i = 0; i < count; ++i) {
        spec.seed = base + static_cast<std::uint64_t>(i);
        const auto bundle = synth::Generate(spec);
        char name[32];
        std::snprintf(name, sizeof(name), "%s_%03d", spec.category.c_str(), i);
        const std::string dir = count == 1 ? synth_out : Child(synth_out, name);
        synth::Emit(bundle, dir);
        written.push_back({{"dir", dir},
                           {"seed", spec.seed},
                           {"points", bundle.scene.cloud.size()},
                           {"superpoints", bundle.scene.partition.num_superpoints()},
                           {"detections", bundle.detections.size()}});
      }
      std::ostringstream h;
      for (const auto& w : written) {
        h << "wrote " << w["dir"].get<std::string>() << ": " << w["points"] << " points, "
          << w["superpoints"] << " super points, " << w["detections"] << " detections\n";
      }
      Report(g, out, json{{"bundles", written}}, h.str());
    } else if (vis_cmd->parsed()) {
      const geom::Scene scene = geom::ReadCloudFile(vis_cloud);
      geom::ViewSet set;
      set.cameras = geom::FixedViewpoints(views, distance, res, res);
      set.options.splat_radius_px = splat;
      set.options.depth_epsilon = depth_eps;
      set.options.threads = g.threads;
      const auto vis = geom::ComputeVisibility(scene.cloud, set.cameras, set.options);
      geom::WriteVisibility(vis_out, vis);
      if (!vis_cameras_out.empty()) geom::WriteViewSet(vis_cameras_out, set);
      json per_view = json::array();
      std::ostringstream h;
      for (int k = 0; k < vis.num_views(); ++k) {
        per_view.push_back(vis.CountVisible(k));
        h << "view " << k << ": " << vis.CountVisible(k) << " of " << vis.num_points()
          << " points visible\n";
      }
      Report(g, out, json{{"views", views}, {"points", vis.num_points()}, {"visible", per_view}},
             h.str());
    } else if (lift_cmd->parsed()) {
      const auto obj = LoadObjectDir(lift_obj, ParseMode(lift_mode), g.threads);
      const auto scores = vote::ScoreUnweighted(obj.inputs(), null_threshold);
      const auto labels = vote::AssignLabels(scores, obj.scene.partition, null_threshold);
      vote::WriteLabeling(lift_out, labels.point_labels);
      if (!lift_scores.empty()) vote::WriteScores(lift_scores, scores, obj.scene.label_names);
      json j = LabelingSummary(labels);
      if (!lift_inst.out.empty()) j["instances"] = WriteInstanceOutput(lift_inst, obj, labels, scores);
      Report(g, out, j,
             "labeled " + std::to_string(j["labeled"].get<std::size_t>()) + " of " +
                 std::to_string(labels.point_labels.size()) + " points; wrote " + lift_out + "\n");
    } else if (train_cmd->parsed()) {
      train::TrainConfig cfg = train_cfg.empty() ? train::TrainConfig{}
                                                 : train::LoadTrainConfig(train_cfg);
      if (o_epochs->count()) cfg.epochs = flags_cfg.epochs;
      if (o_lr->count()) cfg.learning_rate = flags_cfg.learning_rate;
      if (o_opt->count()) {
        cfg.optimizer = optimizer_name == "sgd" ? train::OptimizerKind::kSgd
                                                : train::OptimizerKind::kAdam;
      }
      if (o_loss->count()) {
        cfg.loss = loss_name == "mriou"           ? train::LossKind::kMriou
                   : loss_name == "cross_entropy" ? train::LossKind::kCrossEntropy
                                                  : train::LossKind::kBoth;
      }
      if (o_mix->count()) cfg.mix = flags_cfg.mix;
      if (o_tau->count()) cfg.tau = flags_cfg.tau;
      if (o_freq->count()) cfg.frequencies = flags_cfg.frequencies;
      if (o_hidden->count()) cfg.hidden = flags_cfg.hidden;
      if (o_null->count()) cfg.null_score_init = flags_cfg.null_score_init;
      if (o_std->count()) cfg.init_std = flags_cfg.init_std;
      if (g.seed) cfg.seed = *g.seed;
      cfg.Validate();
      const auto mode = ParseMode(train_mode);
      const auto train_set = LoadObjects(train_objs, mode, g.threads);
      std::vector<train::Object> val_set;
      if (!val_objs.empty()) val_set = LoadObjects(val_objs, mode, g.threads);
      const auto result = train::Train(train_set, val_set, cfg);
      weightnet::SaveCheckpoint(result.params, ckpt_out);
      const std::string report = train::ReportJson(result.report, report_timing);
      if (!report_out.empty()) WriteText(report_out, report);
      const auto& r = result.report;
      std::ostringstream h;
      h << "trained " << r.epoch_loss.size() << " epochs on " << train_set.size()
        << " objects: loss " << r.epoch_loss.front() << " -> " << r.epoch_loss.back()
        << ", train mIoU " << r.epoch_train_miou.front() << " -> " << r.epoch_train_miou.back();
      if (r.validation_miou) h << ", validation mIoU " << *r.validation_miou;
      h << "\nwrote " << ckpt_out << "\n";
      if (g.json) {
        out << report;
      } else {
        out << h.str();
      }
    } else if (lw_cmd->parsed()) {
      const auto params = weightnet::LoadCheckpoint(lw_ckpt);
      const auto obj = LoadObjectDir(lw_obj, ParseMode(lw_mode), g.threads);
      const auto scores = train::PredictScores(params, obj);
      const auto labels = vote::AssignLabels(scores, obj.scene.partition);
      vote::WriteLabeling(lw_out, labels.point_labels);
      if (!lw_scores.empty()) vote::WriteScores(lw_scores, scores, obj.scene.label_names);
      json j = LabelingSummary(labels);
      if (!lw_inst.out.empty()) j["instances"] = WriteInstanceOutput(lw_inst, obj, labels, scores);
      Report(g, out, j,
             "labeled " + std::to_string(j["labeled"].get<std::size_t>()) + " of " +
                 std::to_string(labels.point_labels.size()) + " points; wrote " + lw_out + "\n");
    } else if (es_cmd->parsed()) {
      if (es_objs.size() != es_labels.size()) {
        throw CLI::ValidationError("eval-sem", "--object and --labeling must pair up");
      }
      std::vector<eval::SemanticObject> items;
      for (std::size_t i = 0; i < es_objs.size(); ++i) {
        const auto scene = geom::LoadScene(Child(es_objs[i], "cloud.txt"),
                                           Child(es_objs[i], "labels.json"));
        items.push_back({scene.category, scene.label_names, scene.gt_labels,
                         vote::ReadLabeling(es_labels[i], scene.cloud.size())});
      }
      const auto report = eval::EvaluateSemantic(items);
      const std::string text = eval::ToJson(report);
      if (!es_out.empty()) WriteText(es_out, text);
      if (g.json) {
        out << text;
      } else {
        for (const auto& c : report.categories) out << c.name << ": mIoU " << c.miou << "\n";
        out << "overall mIoU " << report.overall_miou << "\n";
      }
    } else if (ei_cmd->parsed()) {
      if (ei_objs.size() != ei_insts.size()) {
        throw CLI::ValidationError("eval-inst", "--object and --instances must pair up");
      }
      std::vector<instance::InstanceObject> items;
      for (std::size_t i = 0; i < ei_objs.size(); ++i) {
        const auto scene = geom::LoadScene(Child(ei_objs[i], "cloud.txt"),
                                           Child(ei_objs[i], "labels.json"));
        const auto n = scene.cloud.size();
        const auto gt = instance::ReadInstances(Child(ei_objs[i], "instances.txt"), n);
        const auto pred = instance::ReadInstances(ei_insts[i], n);
        items.push_back({scene.category, scene.label_names, gt.Masks(), pred.Masks()});
      }
      const auto result = instance::EvaluateInstances(items);
      const std::string text = instance::ToJson(result);
      if (!ei_out.empty()) WriteText(ei_out, text);
      if (g.json) {
        out << text;
      } else {
        out << "part-aware mAP50 " << result.part_aware_mean << "\npart-agnostic mAP50 "
            << result.part_agnostic_mean << "\n";
      }
    } else if (bc_cmd->parsed()) {
      const auto objs = LoadObjects(bc_objs, ParseMode(bc_det_mode), g.threads);
      json j = json::object();
      if (bc_mode != "normalized") {
        j["raw"] = train::EvaluateConfidenceBaseline(objs, train::ConfidenceMode::kRaw, bc_tau, bc_null);
      }
      if (bc_mode != "raw") {
        j["normalized"] = train::EvaluateConfidenceBaseline(objs, train::ConfidenceMode::kNormalized,
                                                            bc_tau, bc_null);
      }
      std::vector<std::vector<int>> uniform;
      for (const auto& o : objs) {
        const std::vector<double> w(o.detections.size(), bc_tau);
        uniform.push_back(train::LabelsForWeights(o, w, bc_null).point_labels);
      }
      j["uniform"] = train::SemanticMiou(objs, uniform);
      j["objects"] = objs.size();
      if (!bc_out.empty()) WriteText(bc_out, j.dump(2) + "\n");
      std::ostringstream h;
      for (const char* key : {"raw", "normalized", "uniform"}) {
        if (j.contains(key)) h << key << " mIoU " << j[key].get<double>() << "\n";
      }
      Report(g, out, j, h.str());
    } else if (gc_cmd->parsed()) {
      if (g.seed) gc.seed = *g.seed;
      const auto results = gradcheck::RunAll(gc);
      json arr = json::array();
      std::ostringstream h;
      bool ok = true;
      for (const auto& r : results) {
        ok = ok && r.passed();
        arr.push_back({{"suite", r.name},
                       {"instances", r.instances},
                       {"entries", r.entries},
                       {"max_relative_error", r.max_error},
                       {"tolerance", r.tolerance},
                       {"passed", r.passed()},
                       {"worst", r.worst}});
        h << (r.passed() ? "PASS " : "FAIL ") << r.name << ": max relative error " << r.max_error
          << " (tolerance " << r.tolerance << ", " << r.entries << " entries)\n";
      }
      Report(g, out, json{{"suites", arr}, {"passed", ok}}, h.str());
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const CLI::ValidationError& e) {
    if (g.json) {
      err << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
    } else {
      err << e.what() << "\n";
    }
    return kExitUsage;
  } catch (const std::exception& e) {
    if (g.json) {
      err << json{{"error", {{"kind", ErrorKind(e)}, {"message", e.what()}}}}.dump() << "\n";
    } else {
      err << "error: " << e.what() << "\n";
    }
    return kExitFailure;
  }
  return kExitOk;
}

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return Run(args, out, err);
}

}  // namespace liftseg::cli
