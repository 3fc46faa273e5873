// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/plan.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "easr/container.hpp"

namespace easr {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      fail(ErrorCode::InvalidPlan, "unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

std::vector<ExperimentPlan> PlanGrid::expand() const {
  std::vector<ExperimentPlan> plans;
  for (Paradigm p : paradigms) {
    for (Transform t : transforms) {
      ExperimentPlan plan = base;
      plan.paradigm = p;
      plan.transform = t;
      plan.dataset_ref = dataset;
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

PlanGrid load_plan_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open plan file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidPlan, std::string("plan parse failure: ") + e.what());
  }

  reject_unknown_keys(j, {"dataset", "paradigms", "transforms", "models", "seeds", "split",
                          "train", "model_config", "calibration_fraction", "sr"},
                      "plan");

  PlanGrid grid;
  grid.dataset = j.at("dataset").get<std::string>();
  for (const auto& p : j.at("paradigms")) {
    grid.paradigms.push_back(paradigm_from_name(p.get<std::string>()));
  }
  for (const auto& t : j.at("transforms")) {
    grid.transforms.push_back(transform_from_name(t.get<std::string>()));
  }

  ExperimentPlan& base = grid.base;
  if (j.contains("models")) {
    base.models.clear();
    for (const auto& m : j.at("models")) {
      base.models.push_back(model_kind_from_name(m.get<std::string>()));
    }
  }
  if (j.contains("seeds")) {
    base.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  }
  if (j.contains("calibration_fraction")) {
    base.calibration_fraction = j.at("calibration_fraction").get<double>();
  }
  if (j.contains("split")) {
    const json& s = j.at("split");
    reject_unknown_keys(s, {"mode", "fractions", "fold_count"}, "split");
    if (s.contains("mode")) {
      base.split.mode = split_mode_from_name(s.at("mode").get<std::string>());
    }
    if (s.contains("fractions")) {
      const auto f = s.at("fractions").get<std::vector<double>>();
      if (f.size() != 3) fail(ErrorCode::InvalidPlan, "fractions must be [train, valid, test]");
      base.split.train_fraction = f[0];
      base.split.valid_fraction = f[1];
      base.split.test_fraction = f[2];
    }
    if (s.contains("fold_count")) base.split.fold_count = s.at("fold_count").get<int>();
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown_keys(t,
                        {"max_epochs", "patience", "learning_rate", "weight_decay",
                         "batch_size", "adam_beta1", "adam_beta2", "adam_eps",
                         "fine_tune_epochs", "fine_tune_patience"},
                        "train");
    TrainConfig& c = base.train_config;
    c.max_epochs = t.value("max_epochs", c.max_epochs);
    c.patience = t.value("patience", c.patience);
    c.learning_rate = t.value("learning_rate", c.learning_rate);
    c.weight_decay = t.value("weight_decay", c.weight_decay);
    c.batch_size = t.value("batch_size", c.batch_size);
    c.adam_beta1 = t.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = t.value("adam_beta2", c.adam_beta2);
    c.adam_eps = t.value("adam_eps", c.adam_eps);
    c.fine_tune_epochs = t.value("fine_tune_epochs", c.fine_tune_epochs);
    c.fine_tune_patience = t.value("fine_tune_patience", c.fine_tune_patience);
  }
  if (j.contains("model_config")) {
    const json& m = j.at("model_config");
    reject_unknown_keys(m,
                        {"temporal_filters", "kernel_length", "spatial_filters",
                         "pool_window", "pool_stride"},
                        "model_config");
    ModelConfig& c = base.model_config;
    c.temporal_filters = m.value("temporal_filters", c.temporal_filters);
    c.kernel_length = m.value("kernel_length", c.kernel_length);
    c.spatial_filters = m.value("spatial_filters", c.spatial_filters);
    c.pool_window = m.value("pool_window", c.pool_window);
    c.pool_stride = m.value("pool_stride", c.pool_stride);
  }
  if (j.contains("sr")) {
    const json& s = j.at("sr");
    reject_unknown_keys(s, {"segments", "boundary_mode", "multiplier"}, "sr");
    base.sr_segments = s.value("segments", base.sr_segments);
    base.sr_multiplier = s.value("multiplier", base.sr_multiplier);
    if (s.contains("boundary_mode")) {
      const std::string mode = s.at("boundary_mode").get<std::string>();
      if (mode == "equal_width") {
        base.sr_boundary_mode = BoundaryMode::EqualWidth;
      } else if (mode == "random_cuts") {
        base.sr_boundary_mode = BoundaryMode::RandomCuts;
      } else {
        fail(ErrorCode::InvalidPlan, "unknown boundary_mode '" + mode + "'");
      }
    }
  }
  if (grid.paradigms.empty() || grid.transforms.empty()) {
    fail(ErrorCode::InvalidPlan, "plan selects no paradigms or transforms");
  }
  return grid;
}

std::string plan_to_json(const ExperimentPlan& plan) {
  json models = json::array();
  for (ModelKind m : plan.models) models.push_back(model_kind_name(m));
  json j = {
      {"paradigm", paradigm_name(plan.paradigm)},
      {"transform", transform_name(plan.transform)},
      {"models", std::move(models)},
      {"dataset", plan.dataset_ref},
      {"seeds", plan.seeds},
      {"calibration_fraction", plan.calibration_fraction},
      {"split",
       {{"mode", split_mode_name(plan.split.mode)},
        {"fractions",
         {plan.split.train_fraction, plan.split.valid_fraction, plan.split.test_fraction}},
        {"fold_count", plan.split.fold_count}}},
      {"train",
       {{"max_epochs", plan.train_config.max_epochs},
        {"patience", plan.train_config.patience},
        {"learning_rate", plan.train_config.learning_rate},
        {"weight_decay", plan.train_config.weight_decay},
        {"batch_size", plan.train_config.batch_size},
        {"adam_beta1", plan.train_config.adam_beta1},
        {"adam_beta2", plan.train_config.adam_beta2},
        {"adam_eps", plan.train_config.adam_eps},
        {"fine_tune_epochs", plan.train_config.fine_tune_epochs},
        {"fine_tune_patience", plan.train_config.fine_tune_patience}}},
      {"model_config",
       {{"temporal_filters", plan.model_config.temporal_filters},
        {"kernel_length", plan.model_config.kernel_length},
        {"spatial_filters", plan.model_config.spatial_filters},
        {"pool_window", plan.model_config.pool_window},
        {"pool_stride", plan.model_config.pool_stride}}},
      {"sr",
       {{"segments", plan.sr_segments},
        {"boundary_mode",
         plan.sr_boundary_mode == BoundaryMode::EqualWidth ? "equal_width" : "random_cuts"},
        {"multiplier", plan.sr_multiplier}}},
  };
  return j.dump();
}

void write_run_metadata(const RunMetadata& meta, const std::string& path) {
  json j = {
      {"library_version", meta.library_version},
      {"dataset_hash", meta.dataset_hash},
      {"seeds", meta.seeds},
      {"stage_log", meta.stage_log},
      {"wall_seconds", meta.wall_seconds},
  };
  if (!meta.plan_json.empty()) {
    j["plans"] = json::parse(meta.plan_json);
  }
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace easr
