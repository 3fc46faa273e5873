// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/container.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "easr/sha256.hpp"

namespace easr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'E', 'E', 'G', 'B'};

void append_u16(std::string& out, uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char(v >> 8));
}

void append_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void append_f32(std::string& out, float v) {
  static_assert(sizeof(float) == 4);
  char bytes[4];
  std::memcpy(bytes, &v, 4);
  out.append(bytes, 4);  // little-endian host assumed; asserted in manifest tests
}

struct Reader {
  const std::string& bytes;
  size_t pos = 0;
  const std::string& context;

  void need(size_t n) const {
    if (pos + n > bytes.size()) {
      fail(ErrorCode::TruncatedPayload, context + ": expected " + std::to_string(n) +
                                            " more bytes at offset " + std::to_string(pos));
    }
  }
  uint16_t u16() {
    need(2);
    uint16_t v = uint16_t(uint8_t(bytes[pos])) | uint16_t(uint8_t(bytes[pos + 1])) << 8;
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(bytes[pos + size_t(i)])) << (8 * i);
    pos += 4;
    return v;
  }
  float f32() {
    need(4);
    float v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
};

std::string blob_filename(int subject, int run) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%03d_r%02d.eegb", subject, run);
  return buf;
}

std::string encode_blob(const std::vector<const LabeledTrial*>& trials) {
  const int c = trials.front()->trial.channel_count();
  const int t = trials.front()->trial.sample_count();
  std::string out;
  out.reserve(16 + trials.size() * (2 + size_t(c) * t * 4));
  out.append(kMagic, 4);
  append_u16(out, kContainerVersion);
  append_u32(out, uint32_t(c));
  append_u32(out, uint32_t(t));
  append_u32(out, uint32_t(trials.size()));
  for (const LabeledTrial* lt : trials) {
    if (lt->label < 0 || lt->label > 0xffff) {
      fail(ErrorCode::InvalidLabel, "label does not fit the container's u16 field");
    }
    append_u16(out, uint16_t(lt->label));
  }
  for (const LabeledTrial* lt : trials) {
    for (int ch = 0; ch < c; ++ch) {
      for (int ts = 0; ts < t; ++ts) {
        append_f32(out, static_cast<float>(lt->trial.data(ch, ts)));
      }
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.size();
  if (rows == 0) return Matrix(0, 0);
  const auto cols = j.at(0).size();
  Matrix m(static_cast<long>(rows), static_cast<long>(cols));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t jj = 0; jj < cols; ++jj) m(long(i), long(jj)) = j.at(i).at(jj).get<double>();
  }
  return m;
}

}  // namespace

void atomic_write_file(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + tmp + " for writing");
    out.write(bytes.data(), long(bytes.size()));
    if (!out) fail(ErrorCode::IoError, "short write to " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "rename " + tmp + " -> " + path + ": " + ec.message());
}

void write_container(const TrialSet& set, const std::string& dir, const GroundTruth* truth) {
  set.validate();
  if (set.trials.empty()) fail(ErrorCode::EmptySplit, "refusing to write an empty container");

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());

  std::map<std::pair<int, int>, std::vector<const LabeledTrial*>> groups;
  for (const LabeledTrial& lt : set.trials) {
    groups[{lt.subject_id, lt.run_id}].push_back(&lt);
  }

  Sha256 hash;
  json blobs = json::array();
  std::set<int> distinct_subjects;
  for (const auto& [key, trials] : groups) {
    distinct_subjects.insert(key.first);
    const std::string name = blob_filename(key.first, key.second);
    const std::string bytes = encode_blob(trials);
    hash.update(bytes.data(), bytes.size());
    atomic_write_file((fs::path(dir) / name).string(), bytes);
    blobs.push_back({{"subject_id", key.first},
                     {"run_id", key.second},
                     {"file", name},
                     {"n_trials", trials.size()}});
  }

  json manifest = {
      {"format_version", kContainerVersion},
      {"channel_count", set.channel_count()},
      {"sample_count", set.sample_count()},
      {"sampling_rate_hz", set.sampling_rate_hz},
      {"class_count", set.class_count},
      {"n_trials", set.trials.size()},
      {"n_subjects", distinct_subjects.size()},
      {"preprocessed", set.preprocessed},
      {"aligned", set.aligned},
      {"blobs", std::move(blobs)},
      {"content_hash", hash.hex_digest()},
  };
  atomic_write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");

  if (truth) {
    json subjects = json::array();
    for (const SubjectGroundTruth& s : truth->subjects) {
      json mixes = json::array();
      for (const Matrix& m : s.session_mixing) mixes.push_back(matrix_to_json(m));
      subjects.push_back({{"subject_id", s.subject_id},
                          {"gain", s.gain},
                          {"session_mixing", std::move(mixes)}});
    }
    json gt = {
        {"latent_basis", matrix_to_json(truth->latent_basis)},
        {"class_frequencies_hz", truth->class_frequencies_hz},
        {"interference_frequencies_hz", truth->interference_frequencies_hz},
        {"class_oscillation_variance", truth->class_oscillation_variance},
        {"interference_total_variance", truth->interference_total_variance},
        {"subjects", std::move(subjects)},
    };
    atomic_write_file((fs::path(dir) / "ground_truth.json").string(), gt.dump(2) + "\n");
  }
}

TrialSet read_container(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::exists(root / "manifest.json")) {
    fail(ErrorCode::IoError, "no manifest.json under " + dir);
  }
  json manifest;
  try {
    manifest = json::parse(read_file((root / "manifest.json").string()));
  } catch (const json::exception& e) {
    fail(ErrorCode::IoError, std::string("manifest parse failure: ") + e.what());
  }

  const auto version = manifest.at("format_version").get<uint32_t>();
  if (version > kContainerVersion) {
    fail(ErrorCode::VersionUnsupported,
         "manifest version " + std::to_string(version) + " is newer than " +
             std::to_string(kContainerVersion));
  }

  TrialSet set;
  set.class_count = manifest.at("class_count").get<int>();
  set.sampling_rate_hz = manifest.at("sampling_rate_hz").get<double>();
  set.preprocessed = manifest.value("preprocessed", false);
  set.aligned = manifest.value("aligned", false);
  const int want_c = manifest.at("channel_count").get<int>();
  const int want_t = manifest.at("sample_count").get<int>();

  Sha256 hash;
  for (const json& blob : manifest.at("blobs")) {
    const std::string name = blob.at("file").get<std::string>();
    const int subject = blob.at("subject_id").get<int>();
    const int run = blob.at("run_id").get<int>();
    const auto declared_n = blob.at("n_trials").get<size_t>();

    const std::string bytes = read_file((root / name).string());
    hash.update(bytes.data(), bytes.size());

    Reader r{bytes, 0, name};
    r.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
      fail(ErrorCode::BadMagic, name + " does not start with EEGB");
    }
    r.pos = 4;
    const uint16_t blob_version = r.u16();
    if (blob_version > kContainerVersion) {
      fail(ErrorCode::VersionUnsupported,
           name + " has version " + std::to_string(blob_version));
    }
    const uint32_t c = r.u32();
    const uint32_t t = r.u32();
    const uint32_t n = r.u32();
    if (int(c) != want_c || int(t) != want_t || size_t(n) != declared_n) {
      fail(ErrorCode::HashMismatch, name + " disagrees with the manifest counts");
    }
    std::vector<uint16_t> labels(n);
    for (uint32_t i = 0; i < n; ++i) labels[i] = r.u16();
    for (uint32_t i = 0; i < n; ++i) {
      Matrix data(static_cast<int>(c), static_cast<int>(t));
      for (uint32_t ch = 0; ch < c; ++ch) {
        for (uint32_t ts = 0; ts < t; ++ts) {
          data(int(ch), int(ts)) = double(r.f32());
        }
      }
      LabeledTrial lt;
      lt.trial = TrialMatrix(std::move(data));
      lt.label = int(labels[i]);
      lt.subject_id = subject;
      lt.run_id = run;
      set.trials.push_back(std::move(lt));
    }
    if (r.pos != bytes.size()) {
      fail(ErrorCode::TruncatedPayload, name + " carries trailing bytes");
    }
  }

  const std::string want_hash = manifest.at("content_hash").get<std::string>();
  const std::string got_hash = hash.hex_digest();
  if (want_hash != got_hash) {
    fail(ErrorCode::HashMismatch,
         "payload hash " + got_hash + " does not match manifest " + want_hash);
  }

  set.validate();
  return set;
}

std::string container_hash(const std::string& dir) {
  json manifest = json::parse(read_file((fs::path(dir) / "manifest.json").string()));
  return manifest.at("content_hash").get<std::string>();
}

std::optional<GroundTruth> read_ground_truth(const std::string& dir) {
  const fs::path path = fs::path(dir) / "ground_truth.json";
  if (!fs::exists(path)) return std::nullopt;
  json gt = json::parse(read_file(path.string()));
  GroundTruth truth;
  truth.latent_basis = matrix_from_json(gt.at("latent_basis"));
  truth.class_frequencies_hz = gt.at("class_frequencies_hz").get<std::vector<double>>();
  truth.interference_frequencies_hz =
      gt.at("interference_frequencies_hz").get<std::vector<double>>();
  truth.class_oscillation_variance = gt.at("class_oscillation_variance").get<double>();
  truth.interference_total_variance = gt.at("interference_total_variance").get<double>();
  for (const json& s : gt.at("subjects")) {
    SubjectGroundTruth sub;
    sub.subject_id = s.at("subject_id").get<int>();
    sub.gain = s.at("gain").get<double>();
    for (const json& m : s.at("session_mixing")) {
      sub.session_mixing.push_back(matrix_from_json(m));
    }
    truth.subjects.push_back(std::move(sub));
  }
  return truth;
}

void write_references(const std::vector<AlignmentReference>& refs, const std::string& dir) {
  json arr = json::array();
  for (const AlignmentReference& r : refs) {
    arr.push_back({{"subject_id", r.subject_id},
                   {"run_id", r.run_id},
                   {"n_trials_used", r.n_trials_used},
                   {"target_calibrated", r.target_calibrated},
                   {"mean_cov", matrix_to_json(r.mean_cov.data)},
                   {"whitener", matrix_to_json(r.whitener.data)}});
  }
  atomic_write_file((fs::path(dir) / "references.json").string(), arr.dump(2) + "\n");
}

std::vector<AlignmentReference> read_references(const std::string& dir) {
  const std::string path = (fs::path(dir) / "references.json").string();
  if (!fs::exists(path)) fail(ErrorCode::IoError, "no references.json under " + dir);
  json arr = json::parse(read_file(path));
  std::vector<AlignmentReference> refs;
  for (const json& j : arr) {
    AlignmentReference r;
    r.subject_id = j.at("subject_id").get<int>();
    r.run_id = j.at("run_id").get<int>();
    r.n_trials_used = j.at("n_trials_used").get<int>();
    r.target_calibrated = j.at("target_calibrated").get<bool>();
    r.mean_cov = SpdMatrix(matrix_from_json(j.at("mean_cov")));
    r.whitener = SpdMatrix(matrix_from_json(j.at("whitener")));
    refs.push_back(std::move(r));
  }
  return refs;
}

}  // namespace easr
