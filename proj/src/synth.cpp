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

#include "bytegan/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>

namespace bytegan {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::uint8_t, 8> kRecordHeader = {0x7F, 'R', 'E', 'C', 0x01, 0x00, 0x00, 0x00};
// Complementary nibble pairs: black and white in the palette, so the payload
// averages to flat grey per 2x2 Hilbert block, while as grey levels they are the
// extremes and match random data on average.
constexpr std::array<std::uint8_t, 2> kPayloadPool = {0x0F, 0xF0};

std::size_t uniform_in(SplitMix64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

}  // namespace

std::vector<std::uint8_t> synth_file(bool anomalous, std::uint64_t file_seed, const SynthSpec& spec) {
  if (spec.min_size == 0 || spec.min_size > spec.max_size) throw Error("invalid synthetic size range");
  SplitMix64 rng(file_seed);
  const std::size_t size = uniform_in(rng, spec.min_size, spec.max_size);
  const std::size_t record_len = 256;
  const std::size_t period = uniform_in(rng, 16, 64);

  std::array<std::uint8_t, 4> alphabet{};
  for (auto& a : alphabet) a = kPayloadPool[rng.below(kPayloadPool.size())];
  std::vector<std::uint8_t> motif(period);
  for (auto& m : motif) m = alphabet[rng.below(alphabet.size())];

  std::vector<std::uint8_t> out;
  out.reserve(size);
  std::size_t record = 0;
  while (out.size() < size) {
    auto header = kRecordHeader;
    header[6] = static_cast<std::uint8_t>(record & 0xFF);
    for (std::size_t i = 0; i < header.size() && out.size() < size; ++i) out.push_back(header[i]);
    for (std::size_t i = 0; i < record_len - header.size() && out.size() < size; ++i) {
      out.push_back(motif[i % period]);
    }
    ++record;
  }
  if (anomalous) {
    const std::size_t segments = uniform_in(rng, 1, 3);
    for (std::size_t s = 0; s < segments; ++s) {
      const std::size_t len = std::min(size, uniform_in(rng, 512, 2048));
      const std::size_t at = static_cast<std::size_t>(rng.below(size - len + 1));
      for (std::size_t i = 0; i < len; ++i) out[at + i] = static_cast<std::uint8_t>(rng.next() & 0xFF);
    }
  }
  return out;
}

std::vector<ManifestEntry> synth_corpus(const SynthSpec& spec, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());
  SplitMix64 seeds(spec.seed);
  std::vector<ManifestEntry> entries;
  auto emit = [&](bool anomalous, std::size_t count) {
    const fs::path dir = out_dir / (anomalous ? "anomalous" : "benign");
    if (count > 0) {
      fs::create_directories(dir, ec);
      if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto data = synth_file(anomalous, seeds.next(), spec);
      char name[32];
      std::snprintf(name, sizeof(name), "%05zu.bin", i);
      const fs::path path = dir / name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
      if (!out.flush()) throw Error("cannot write " + path.string());
      ManifestEntry e;
      e.path = path;
      e.sha256 = sha256_hex(data);
      e.size_bytes = data.size();
      e.label = anomalous ? Label::malicious : Label::benign;
      e.family = anomalous ? "synthetic-anomalous" : "synthetic-benign";
      entries.push_back(std::move(e));
    }
  };
  emit(false, spec.benign);
  emit(true, spec.anomalous);
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  write_manifest(out_dir / "manifest.jsonl", entries);
  return entries;
}

}  // namespace bytegan
