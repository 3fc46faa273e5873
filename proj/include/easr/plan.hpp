// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "easr/experiment.hpp"

namespace easr {

// A plan file describes a grid: the cross product of paradigms x transforms,
// sharing dataset, splits, models, seeds and training configuration. Documented
// key schema in the README; unknown keys are rejected.
struct PlanGrid {
  std::string dataset;
  std::vector<Paradigm> paradigms;
  std::vector<Transform> transforms;
  ExperimentPlan base;  // paradigm/transform fields overwritten per grid cell

  std::vector<ExperimentPlan> expand() const;
};

PlanGrid load_plan_grid(const std::string& path);

// JSON echo of a resolved plan for run metadata.
std::string plan_to_json(const ExperimentPlan& plan);

void write_run_metadata(const RunMetadata& meta, const std::string& path);

}  // namespace easr
