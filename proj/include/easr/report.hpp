// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "easr/experiment.hpp"

namespace easr {

// results.csv: header paradigm,transform,model,unit,seed,accuracy,status with
// accuracy fixed to six decimals, rows in table order (byte-deterministic).
std::string result_csv(const ResultTable& table);
void write_result_csv(const ResultTable& table, const std::string& path);
ResultTable read_result_csv(const std::string& path);

// Aligned-text table: transform x paradigm rows, one column per model plus a
// row-weighted Overall column (mean +- std in percent), followed by the paired
// delta-vs-baseline block when baseline rows exist.
std::string render_report(const ResultTable& table, const std::string& baseline = "none");

}  // namespace easr
