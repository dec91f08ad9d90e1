/*
 Copyright 2026 The bytegan Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Content-addressed file manifests and deterministic one-class splits.
//
// Manifest files hold one JSON object per line with a fixed field order:
//   {"path":..., "sha256":..., "size_bytes":..., "label":..., "family":..., "split":...}
// followed, once a file has been encoded, by an "image" sidecar object
//   {"payload_len":..., "layout":..., "coloring":..., "order":..., "source_sha256":..., "file":...}

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bytegan/common.hpp"

namespace bytegan {

enum class Split : std::uint8_t { train, test, validation };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

struct ImageSidecar {
  std::uint64_t payload_len = 0;
  std::string layout;
  std::string coloring;
  unsigned order = 0;
  std::string source_sha256;
  std::string file;
};

struct ManifestEntry {
  std::filesystem::path path;
  std::string sha256;  // lowercase hex, 64 chars
  std::uint64_t size_bytes = 0;
  Label label = Label::benign;
  std::optional<std::string> family;
  std::optional<Split> split;
  std::optional<ImageSidecar> image;
};

struct SplitAssignment {
  std::size_t entry_id = 0;
  Split split = Split::train;
  std::uint64_t seed = 0;
};

struct IngestWarning {
  std::filesystem::path path;
  std::string message;
};

struct IngestResult {
  std::vector<ManifestEntry> entries;
  std::vector<IngestWarning> warnings;
};

struct IngestOptions {
  Label label = Label::benign;
  std::uint64_t min_size = 2ull * 1024 * 1024;
  std::uint64_t max_size = 50ull * 1024 * 1024;
  std::optional<std::string> family;
  unsigned workers = 1;
};

struct SplitRatios {
  double train = 0.6;
  double test = 0.2;
  double validation = 0.2;
};

enum class VerifyIssue : std::uint8_t { missing, size_changed, digest_changed };
std::string_view to_string(VerifyIssue issue);

struct VerifyFinding {
  std::size_t entry_id = 0;
  std::filesystem::path path;
  VerifyIssue issue = VerifyIssue::missing;
};

std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_file(const std::filesystem::path& path);

/// Walks `root` recursively. Files outside [min_size, max_size] are ignored,
/// unreadable files become warnings, byte-identical files keep the first path.
/// Throws when root does not exist.
IngestResult ingest_dir(const std::filesystem::path& root, const IngestOptions& opts);

/// Benign entries are shuffled and cut train/test/validation (floor, floor, remainder);
/// malicious entries are shuffled and halved between test and validation.
std::vector<SplitAssignment> split_manifest(std::span<const ManifestEntry> entries,
                                            const SplitRatios& ratios, std::uint64_t seed);

/// Writes the assignment into each entry's `split` field.
void apply_splits(std::vector<ManifestEntry>& entries, std::span<const SplitAssignment> splits);

/// Throws InvariantViolation if a malicious entry is in train or an entry has no split.
void check_one_class_purity(std::span<const ManifestEntry> entries);

std::vector<VerifyFinding> verify_manifest(std::span<const ManifestEntry> entries);

std::string manifest_line(const ManifestEntry& entry);
ManifestEntry parse_manifest_line(std::string_view line);
void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> read_manifest(std::istream& in);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Deterministic, platform-independent PRNG used for shuffles and synthetic data.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  double uniform();  // [0, 1)

 private:
  std::uint64_t state_;
};

template <class T>
void seeded_shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn);

}  // namespace bytegan

#include "bytegan/detail/parallel.hpp"
