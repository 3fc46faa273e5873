// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "easr/container.hpp"

namespace easr {

using nlohmann::json;

namespace {
constexpr char kMagic[4] = {'E', 'E', 'G', 'W'};
}

void save_checkpoint(const Decoder& decoder, int channels, int samples,
                     const std::string& path) {
  json header = {
      {"kind", decoder.kind()},
      {"channels", channels},
      {"samples", samples},
      {"classes", decoder.class_count()},
  };
  if (const auto* shallow = dynamic_cast<const ShallowDecoder*>(&decoder)) {
    const ModelConfig& cfg = shallow->config();
    header["model_config"] = {{"temporal_filters", cfg.temporal_filters},
                              {"kernel_length", cfg.kernel_length},
                              {"spatial_filters", cfg.spatial_filters},
                              {"pool_window", shallow->pool_window()},
                              {"pool_stride", shallow->pool_stride()}};
  }
  json tensors = json::array();
  const std::vector<std::string> names = decoder.param_names();
  for (size_t i = 0; i < decoder.params().size(); ++i) {
    const Matrix& p = decoder.params()[i];
    tensors.push_back({{"name", names[i]}, {"rows", p.rows()}, {"cols", p.cols()}});
  }
  header["tensors"] = std::move(tensors);

  const std::string header_str = header.dump();
  std::string bytes;
  bytes.append(kMagic, 4);
  bytes.push_back(char(kCheckpointVersion & 0xff));
  bytes.push_back(char(kCheckpointVersion >> 8));
  const auto hlen = uint32_t(header_str.size());
  for (int i = 0; i < 4; ++i) bytes.push_back(char((hlen >> (8 * i)) & 0xff));
  bytes += header_str;
  for (const Matrix& p : decoder.params()) {
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        const double v = p(r, c);
        char buf[8];
        std::memcpy(buf, &v, 8);
        bytes.append(buf, 8);
      }
    }
  }
  atomic_write_file(path, bytes);
}

std::unique_ptr<Decoder> load_checkpoint(const std::string& path, int* channels_out,
                                         int* samples_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorCode::BadMagic, path + " is not a checkpoint");
  }
  const uint16_t version = uint16_t(uint8_t(bytes[4])) | uint16_t(uint8_t(bytes[5])) << 8;
  if (version > kCheckpointVersion) {
    fail(ErrorCode::VersionUnsupported, "checkpoint version " + std::to_string(version));
  }
  uint32_t hlen = 0;
  for (int i = 0; i < 4; ++i) hlen |= uint32_t(uint8_t(bytes[6 + size_t(i)])) << (8 * i);
  if (bytes.size() < 10 + size_t(hlen)) {
    fail(ErrorCode::TruncatedPayload, "checkpoint header truncated");
  }
  json header;
  try {
    header = json::parse(bytes.substr(10, hlen));
  } catch (const json::exception& e) {
    fail(ErrorCode::IoError, std::string("checkpoint header: ") + e.what());
  }

  const std::string kind = header.at("kind").get<std::string>();
  const int channels = header.at("channels").get<int>();
  const int samples = header.at("samples").get<int>();
  const int classes = header.at("classes").get<int>();

  std::unique_ptr<Decoder> decoder;
  if (kind == "shallow") {
    ModelConfig cfg;
    const json& mc = header.at("model_config");
    cfg.temporal_filters = mc.at("temporal_filters").get<int>();
    cfg.kernel_length = mc.at("kernel_length").get<int>();
    cfg.spatial_filters = mc.at("spatial_filters").get<int>();
    cfg.pool_window = mc.at("pool_window").get<int>();
    cfg.pool_stride = mc.at("pool_stride").get<int>();
    decoder = std::make_unique<ShallowDecoder>(channels, samples, classes, cfg, /*seed=*/0);
  } else if (kind == "linear") {
    decoder = std::make_unique<LinearDecoder>(channels, samples, classes);
  } else {
    fail(ErrorCode::VersionUnsupported, "unknown decoder kind '" + kind + "'");
  }

  size_t offset = 10 + size_t(hlen);
  const json& tensors = header.at("tensors");
  if (tensors.size() != decoder->params().size()) {
    fail(ErrorCode::TruncatedPayload, "tensor table does not match the architecture");
  }
  for (size_t i = 0; i < decoder->params().size(); ++i) {
    Matrix& p = decoder->params()[i];
    const auto rows = tensors.at(i).at("rows").get<Eigen::Index>();
    const auto cols = tensors.at(i).at("cols").get<Eigen::Index>();
    if (rows != p.rows() || cols != p.cols()) {
      fail(ErrorCode::DimensionMismatch, "tensor shape mismatch in checkpoint");
    }
    const size_t need = size_t(rows) * size_t(cols) * 8;
    if (offset + need > bytes.size()) {
      fail(ErrorCode::TruncatedPayload, "checkpoint payload truncated");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v;
        std::memcpy(&v, bytes.data() + offset, 8);
        p(r, c) = v;
        offset += 8;
      }
    }
  }
  if (offset != bytes.size()) {
    fail(ErrorCode::TruncatedPayload, "checkpoint carries trailing bytes");
  }
  if (channels_out) *channels_out = channels;
  if (samples_out) *samples_out = samples;
  return decoder;
}

}  // namespace easr
