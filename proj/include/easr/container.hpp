// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "easr/align.hpp"
#include "easr/core.hpp"
#include "easr/synthgen.hpp"

namespace easr {

// On-disk dataset container: a directory holding manifest.json plus one binary
// blob per (subject, session) and optional sidecars.
//
// Blob layout (little-endian): magic "EEGB", u16 version, u32 C, u32 T, u32 N,
// N x u16 labels, then N*C*T float32 samples, trial-major then channel-major.
// Trials are stored grouped by (subject, session) in ascending order; the
// manifest's content_hash is the SHA-256 over all blob bytes in manifest order.
//
// Precision boundary: float32 on disk, float64 in memory, applied at load time.

inline constexpr uint16_t kContainerVersion = 1;
inline constexpr uint16_t kContainerMinVersion = 0;  // v0 shares the v1 layout

void write_container(const TrialSet& set, const std::string& dir,
                     const GroundTruth* truth = nullptr);

TrialSet read_container(const std::string& dir);

// Content hash recorded in the manifest (recomputed and verified on read).
std::string container_hash(const std::string& dir);

std::optional<GroundTruth> read_ground_truth(const std::string& dir);

// Alignment references sidecar (references.json), written by the align stage so
// align -> train runs are resumable and auditable.
void write_references(const std::vector<AlignmentReference>& refs, const std::string& dir);
std::vector<AlignmentReference> read_references(const std::string& dir);

// write-temp-then-rename
void atomic_write_file(const std::string& path, const std::string& bytes);

}  // namespace easr
