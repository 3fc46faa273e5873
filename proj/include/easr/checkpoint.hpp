// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "easr/model.hpp"

namespace easr {

// Versioned binary checkpoint: magic "EEGW", u16 version, u32 header length,
// JSON header (kind, shapes, architecture), float64 little-endian payload per
// tensor in header order, row-major.
inline constexpr uint16_t kCheckpointVersion = 1;

void save_checkpoint(const Decoder& decoder, int channels, int samples,
                     const std::string& path);

std::unique_ptr<Decoder> load_checkpoint(const std::string& path, int* channels_out = nullptr,
                                         int* samples_out = nullptr);

}  // namespace easr
