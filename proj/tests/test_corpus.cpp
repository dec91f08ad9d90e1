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

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "bytegan/corpus.hpp"
#include "temp_dir.hpp"

namespace bytegan {
namespace {

namespace fs = std::filesystem;
using testing_oracles::TempDir;

constexpr std::uint64_t kMiB = 1024ull * 1024;

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

// Sparse file of the given size; the last byte makes the digest unique.
void sized_file(const fs::path& p, std::uint64_t size, char tag) {
  { std::ofstream(p, std::ios::binary) << ""; }
  fs::resize_file(p, size);
  std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(static_cast<std::streamoff>(size - 1));
  f.put(tag);
}

std::vector<ManifestEntry> fake_entries(std::size_t benign, std::size_t malicious) {
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < benign + malicious; ++i) {
    ManifestEntry e;
    e.path = "f" + std::to_string(i);
    e.sha256 = sha256_hex(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(e.path.c_str()), e.path.string().size()));
    e.size_bytes = 10;
    e.label = i < benign ? Label::benign : Label::malicious;
    out.push_back(e);
  }
  return out;
}

std::map<Split, std::size_t> split_sizes(std::span<const SplitAssignment> a) {
  std::map<Split, std::size_t> n;
  for (const auto& s : a) ++n[s.split];
  return n;
}

TEST(Sha256, KnownVectors) {
  const std::string abc = "abc";
  EXPECT_EQ(sha256_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(abc.data()), 3)),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex({}), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  TempDir dir;
  write_file(dir / "abc", abc);
  EXPECT_EQ(sha256_file(dir / "abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Ingest, SizeWindowKeepsOnlyTheMiddleFile) {
  TempDir dir;
  sized_file(dir / "small", 1 * kMiB, 'a');
  sized_file(dir / "medium", 10 * kMiB, 'b');
  sized_file(dir / "large", 60 * kMiB, 'c');
  IngestOptions opts;  // 2 MB to 50 MB
  const auto result = ingest_dir(dir.path(), opts);
  ASSERT_EQ(result.entries.size(), 1u);
  EXPECT_EQ(result.entries[0].path.filename(), "medium");
  EXPECT_EQ(result.entries[0].size_bytes, 10 * kMiB);
  EXPECT_EQ(result.entries[0].sha256, sha256_file(dir / "medium"));
}

TEST(Ingest, EmptyDirectoryAndMissingRoot) {
  TempDir dir;
  EXPECT_TRUE(ingest_dir(dir.path(), {}).entries.empty());
  EXPECT_THROW(ingest_dir(dir / "nope", {}), Error);
}

TEST(Ingest, DuplicatesCollapseToFirstPath) {
  TempDir dir;
  write_file(dir / "b" / "copy", "same bytes");
  write_file(dir / "a" / "orig", "same bytes");
  write_file(dir / "c", "other bytes");
  IngestOptions opts;
  opts.min_size = 1;
  opts.label = Label::malicious;
  opts.family = "fam";
  opts.workers = 3;
  const auto result = ingest_dir(dir.path(), opts);
  ASSERT_EQ(result.entries.size(), 2u);
  EXPECT_EQ(result.entries[0].path, dir / "a" / "orig");
  EXPECT_EQ(result.entries[0].label, Label::malicious);
  EXPECT_EQ(result.entries[0].family, "fam");
  EXPECT_TRUE(result.warnings.empty());
}

TEST(Split, TenBenignSixTwoTwo) {
  const auto entries = fake_entries(10, 0);
  const auto a = split_manifest(entries, {0.6, 0.2, 0.2}, 42);
  auto n = split_sizes(a);
  EXPECT_EQ(n[Split::train], 6u);
  EXPECT_EQ(n[Split::test], 2u);
  EXPECT_EQ(n[Split::validation], 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].entry_id, i);
    EXPECT_EQ(a[i].seed, 42u);
  }
}

TEST(Split, MaliciousNeverTrainsAndSplitsEvenly) {
  const auto entries = fake_entries(20, 9);
  const auto a = split_manifest(entries, {}, 42);
  std::size_t m_test = 0, m_val = 0;
  for (const auto& s : a) {
    if (entries[s.entry_id].label != Label::malicious) continue;
    ASSERT_NE(s.split, Split::train);
    (s.split == Split::test ? m_test : m_val) += 1;
  }
  EXPECT_EQ(m_test, 4u);
  EXPECT_EQ(m_val, 5u);
}

TEST(Split, SeedControlsPermutationNotSizes) {
  const auto entries = fake_entries(30, 10);
  const auto a1 = split_manifest(entries, {}, 1);
  const auto a1b = split_manifest(entries, {}, 1);
  const auto a2 = split_manifest(entries, {}, 2);
  bool differs = false;
  for (std::size_t i = 0; i < a1.size(); ++i) {
    EXPECT_EQ(a1[i].split, a1b[i].split);
    differs |= a1[i].split != a2[i].split;
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(split_sizes(a1), split_sizes(a2));
}

TEST(Split, InputOrderDoesNotMatter) {
  auto entries = fake_entries(15, 6);
  const auto a = split_manifest(entries, {}, 9);
  std::map<std::string, Split> by_sha;
  for (const auto& s : a) by_sha[entries[s.entry_id].sha256] = s.split;
  std::reverse(entries.begin(), entries.end());
  for (const auto& s : split_manifest(entries, {}, 9)) {
    EXPECT_EQ(by_sha.at(entries[s.entry_id].sha256), s.split);
  }
}

TEST(Split, RejectsBadRatios) {
  const auto entries = fake_entries(4, 0);
  EXPECT_THROW(split_manifest(entries, {0.5, 0.2, 0.2}, 1), Error);
  EXPECT_THROW(split_manifest(entries, {1.2, -0.2, 0.0}, 1), Error);
}

TEST(Purity, DetectsMaliciousInTrain) {
  auto entries = fake_entries(3, 2);
  apply_splits(entries, split_manifest(entries, {}, 5));
  EXPECT_NO_THROW(check_one_class_purity(entries));
  entries[4].split = Split::train;
  EXPECT_THROW(check_one_class_purity(entries), InvariantViolation);
  entries[4].split.reset();
  EXPECT_THROW(check_one_class_purity(entries), InvariantViolation);
}

TEST(Verify, ReportsExactlyTheChangedEntries) {
  TempDir dir;
  write_file(dir / "a", "aaaa");
  write_file(dir / "b", "bbbb");
  write_file(dir / "c", "cccc");
  IngestOptions opts;
  opts.min_size = 1;
  const auto entries = ingest_dir(dir.path(), opts).entries;
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_TRUE(verify_manifest(entries).empty());

  write_file(dir / "a", "aa");    // truncated
  write_file(dir / "b", "bbbx");  // same size, new content
  fs::remove(dir / "c");
  const auto findings = verify_manifest(entries);
  ASSERT_EQ(findings.size(), 3u);
  EXPECT_EQ(findings[0].entry_id, 0u);
  EXPECT_EQ(findings[0].issue, VerifyIssue::size_changed);
  EXPECT_EQ(findings[1].issue, VerifyIssue::digest_changed);
  EXPECT_EQ(findings[2].issue, VerifyIssue::missing);
}

TEST(Manifest, LinesRoundTrip) {
  auto entries = fake_entries(2, 1);
  entries[0].family = "x";
  entries[1].split = Split::validation;
  ImageSidecar img;
  img.payload_len = 20;
  img.layout = "hilbert";
  img.coloring = "rgb";
  img.order = 3;
  img.source_sha256 = entries[2].sha256;
  img.file = "p.png";
  entries[2].image = img;

  std::stringstream ss;
  write_manifest(ss, entries);
  const auto back = read_manifest(ss);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(manifest_line(back[i]), manifest_line(entries[i]));
  EXPECT_EQ(back[0].family, "x");
  EXPECT_EQ(back[1].split, Split::validation);
  EXPECT_EQ(back[2].image->order, 3u);

  const auto line = manifest_line(entries[0]);
  EXPECT_EQ(line.find("{\"path\":"), 0u);
  EXPECT_NE(line.find("\"split\":null"), std::string::npos);
  EXPECT_THROW(parse_manifest_line("{not json"), Error);
}

TEST(SplitMix, ReferenceSequence) {
  // First outputs for seed 0 from the published SplitMix64 reference implementation.
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafull);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ull);
  EXPECT_EQ(rng.next(), 0x06c45d188009454full);
}

}  // namespace
}  // namespace bytegan
