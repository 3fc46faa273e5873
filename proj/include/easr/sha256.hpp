// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace easr {

// Incremental SHA-256 (FIPS 180-4). Used for container payload integrity and
// dataset content hashes.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, size_t len);
  // Finalizes and returns the lowercase hex digest; the object must not be
  // updated afterwards.
  std::string hex_digest();

 private:
  void process_block(const uint8_t* block);

  uint32_t state_[8];
  uint64_t bit_count_ = 0;
  uint8_t buffer_[64];
  size_t buffer_len_ = 0;
};

std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);

}  // namespace easr
