// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "easr/container.hpp"

namespace easr {

namespace {

std::string format_accuracy(double accuracy) {
  if (std::isnan(accuracy)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", accuracy);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

struct CellStats {
  int n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    ++n;
    sum += v;
    sum_sq += v * v;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stddev() const {
    if (!n) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / n - m * m));
  }
};

std::string cell_text(const CellStats& s) {
  if (s.n == 0) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f +- %.2f", 100.0 * s.mean(), 100.0 * s.stddev());
  return buf;
}

std::string delta_text(const SummaryRow& row) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.2f +- %.2f", row.delta_mean_pts, row.delta_std_pts);
  return buf;
}

void render_table(std::ostringstream& out, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> widths(header.size());
  for (size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  auto emit = [&](const std::vector<std::string>& row) {
    out << "| ";
    for (size_t c = 0; c < row.size(); ++c) {
      out << row[c] << std::string(widths[c] - row[c].size(), ' ');
      out << (c + 1 < row.size() ? " | " : " |\n");
    }
  };
  emit(header);
  out << "|";
  for (size_t c = 0; c < header.size(); ++c) {
    out << std::string(widths[c] + 2, '-') << "|";
  }
  out << "\n";
  for (const auto& row : rows) emit(row);
}

}  // namespace

std::string result_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "paradigm,transform,model,unit,seed,accuracy,status\n";
  for (const ResultRow& row : table.rows) {
    out << row.paradigm << ',' << row.transform << ',' << row.model << ',' << row.unit
        << ',' << row.seed << ',' << format_accuracy(row.accuracy) << ',' << row.status
        << '\n';
  }
  return out.str();
}

void write_result_csv(const ResultTable& table, const std::string& path) {
  atomic_write_file(path, result_csv(table));
}

ResultTable read_result_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::IoError, path + " is empty");
  if (line != "paradigm,transform,model,unit,seed,accuracy,status") {
    fail(ErrorCode::IoError, path + " does not carry the results header");
  }
  ResultTable table;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 7) {
      fail(ErrorCode::IoError,
           path + ":" + std::to_string(line_no) + ": expected 7 fields");
    }
    ResultRow row;
    row.paradigm = fields[0];
    row.transform = fields[1];
    row.model = fields[2];
    row.unit = fields[3];
    row.seed = std::stoull(fields[4]);
    row.accuracy = fields[5] == "nan" ? std::nan("") : std::stod(fields[5]);
    row.status = fields[6];
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string render_report(const ResultTable& table, const std::string& baseline) {
  // (transform, paradigm) -> model -> stats, over ok rows
  std::map<std::pair<std::string, std::string>, std::map<std::string, CellStats>> cells;
  std::set<std::string> models;
  bool any_baseline = false;
  for (const ResultRow& row : table.rows) {
    if (row.status != "ok") continue;
    cells[{row.transform, row.paradigm}][row.model].add(row.accuracy);
    models.insert(row.model);
    if (row.transform == baseline) any_baseline = true;
  }
  if (cells.empty()) return "(no successful rows)\n";

  std::ostringstream out;
  out << "Accuracy (% mean +- std across units and seeds)\n\n";
  std::vector<std::string> header = {"transform", "paradigm"};
  header.insert(header.end(), models.begin(), models.end());
  header.push_back("Overall");

  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, by_model] : cells) {
    std::vector<std::string> row = {key.first, key.second};
    CellStats overall;
    for (const std::string& model : models) {
      const auto it = by_model.find(model);
      if (it == by_model.end()) {
        row.push_back("-");
      } else {
        row.push_back(cell_text(it->second));
        overall.n += it->second.n;
        overall.sum += it->second.sum;
        overall.sum_sq += it->second.sum_sq;
      }
    }
    row.push_back(cell_text(overall));
    rows.push_back(std::move(row));
  }
  render_table(out, header, rows);

  if (any_baseline) {
    out << "\nPaired delta vs '" << baseline << "' (percentage points)\n\n";
    const std::vector<SummaryRow> summary = summarize(table, baseline);
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> delta;
    for (const SummaryRow& s : summary) {
      if (s.transform == baseline) continue;
      delta[{s.transform, s.paradigm}][s.model] = delta_text(s);
    }
    std::vector<std::vector<std::string>> drows;
    std::vector<std::string> dheader = {"transform", "paradigm"};
    dheader.insert(dheader.end(), models.begin(), models.end());
    for (const auto& [key, by_model] : delta) {
      std::vector<std::string> row = {key.first, key.second};
      for (const std::string& model : models) {
        const auto it = by_model.find(model);
        row.push_back(it == by_model.end() ? "-" : it->second);
      }
      drows.push_back(std::move(row));
    }
    render_table(out, dheader, drows);
  }
  return out.str();
}

}  // namespace easr
