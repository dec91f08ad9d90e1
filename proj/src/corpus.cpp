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

#include "bytegan/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <unordered_set>

namespace bytegan {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train:
      return "train";
    case Split::test:
      return "test";
    case Split::validation:
      return "validation";
  }
  return "train";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "test") return Split::test;
  if (text == "validation") return Split::validation;
  throw Error("unknown split '" + std::string(text) + "'");
}

std::string_view to_string(VerifyIssue issue) {
  switch (issue) {
    case VerifyIssue::missing:
      return "missing";
    case VerifyIssue::size_changed:
      return "size_changed";
    case VerifyIssue::digest_changed:
      return "digest_changed";
  }
  return "missing";
}

// ---------------------------------------------------------------------------
// Hashing

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("sha256 initialisation failed");
    }
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("sha256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw Error("sha256 final failed");
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 0x0F];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) h.update(buf.data(), static_cast<std::size_t>(got));
  }
  if (in.bad()) throw Error("read error on " + path.string());
  return h.hex();
}

// ---------------------------------------------------------------------------
// PRNG

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw Error("SplitMix64::below needs a positive bound");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t r = next();
  while (r >= limit) r = next();
  return r % bound;
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Ingest

IngestResult ingest_dir(const fs::path& root, const IngestOptions& opts) {
  std::error_code ec;
  if (!fs::exists(root, ec) || !fs::is_directory(root, ec)) {
    throw Error("corpus root " + root.string() + " does not exist or is not a directory");
  }
  if (opts.min_size > opts.max_size) throw Error("min_size exceeds max_size");

  struct Candidate {
    fs::path path;
    std::uint64_t size = 0;
    std::string sha;
    std::string error;
  };
  std::vector<Candidate> candidates;
  IngestResult result;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error("cannot read corpus root " + root.string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      result.warnings.push_back({it->path(), ec.message()});
      ec.clear();
      continue;
    }
    std::error_code fe;
    if (!it->is_regular_file(fe)) continue;
    const auto size = it->file_size(fe);
    if (fe) {
      result.warnings.push_back({it->path(), fe.message()});
      continue;
    }
    if (size == 0 || size < opts.min_size || size > opts.max_size) continue;
    candidates.push_back({it->path(), size, {}, {}});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.path < b.path; });

  parallel_for(candidates.size(), opts.workers, [&](std::size_t i) {
    try {
      candidates[i].sha = sha256_file(candidates[i].path);
    } catch (const std::exception& e) {
      candidates[i].error = e.what();
    }
  });

  std::unordered_set<std::string> seen;
  for (auto& c : candidates) {
    if (!c.error.empty()) {
      result.warnings.push_back({c.path, c.error});
      continue;
    }
    if (!seen.insert(c.sha).second) continue;
    ManifestEntry e;
    e.path = c.path;
    e.sha256 = std::move(c.sha);
    e.size_bytes = c.size;
    e.label = opts.label;
    e.family = opts.family;
    result.entries.push_back(std::move(e));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Splits

std::vector<SplitAssignment> split_manifest(std::span<const ManifestEntry> entries,
                                            const SplitRatios& ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.test < 0 || ratios.validation < 0) {
    throw Error("split ratios must be non-negative");
  }
  if (std::abs(ratios.train + ratios.test + ratios.validation - 1.0) > 1e-9) {
    throw Error("split ratios must sum to 1");
  }
  std::vector<std::size_t> benign;
  std::vector<std::size_t> malicious;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    (entries[i].label == Label::benign ? benign : malicious).push_back(i);
  }
  if (ratios.train > 0 && benign.empty() && !entries.empty()) {
    throw Error("a non-zero train ratio needs benign entries");
  }
  // Canonical order first, so the result does not depend on input order.
  auto canonical = [&](std::size_t a, std::size_t b) {
    if (entries[a].sha256 != entries[b].sha256) return entries[a].sha256 < entries[b].sha256;
    return entries[a].path < entries[b].path;
  };
  std::sort(benign.begin(), benign.end(), canonical);
  std::sort(malicious.begin(), malicious.end(), canonical);

  SplitMix64 rng(seed);
  seeded_shuffle(benign, rng);
  seeded_shuffle(malicious, rng);

  std::vector<SplitAssignment> out(entries.size());
  const auto n = static_cast<double>(benign.size());
  const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * n + 1e-9));
  const auto n_test = std::min(benign.size() - n_train,
                               static_cast<std::size_t>(std::floor(ratios.test * n + 1e-9)));
  for (std::size_t k = 0; k < benign.size(); ++k) {
    const Split s = k < n_train ? Split::train : (k < n_train + n_test ? Split::test : Split::validation);
    out[benign[k]] = {benign[k], s, seed};
  }
  const std::size_t m_test = malicious.size() / 2;
  for (std::size_t k = 0; k < malicious.size(); ++k) {
    out[malicious[k]] = {malicious[k], k < m_test ? Split::test : Split::validation, seed};
  }
  for (const auto& a : out) {
    if (a.split == Split::train && entries[a.entry_id].label == Label::malicious) {
      throw InvariantViolation("malicious entry assigned to the train split");
    }
  }
  return out;
}

void apply_splits(std::vector<ManifestEntry>& entries, std::span<const SplitAssignment> splits) {
  for (const auto& a : splits) {
    if (a.entry_id >= entries.size()) throw Error("split assignment refers to a missing entry");
    entries[a.entry_id].split = a.split;
  }
}

void check_one_class_purity(std::span<const ManifestEntry> entries) {
  for (const auto& e : entries) {
    if (!e.split) throw InvariantViolation("entry " + e.path.string() + " has no split");
    if (*e.split == Split::train && e.label == Label::malicious) {
      throw InvariantViolation("malicious entry " + e.path.string() + " is in the train split");
    }
  }
}

std::vector<VerifyFinding> verify_manifest(std::span<const ManifestEntry> entries) {
  std::vector<VerifyFinding> report;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    std::error_code ec;
    if (!fs::is_regular_file(e.path, ec)) {
      report.push_back({i, e.path, VerifyIssue::missing});
      continue;
    }
    const auto size = fs::file_size(e.path, ec);
    if (ec) {
      report.push_back({i, e.path, VerifyIssue::missing});
      continue;
    }
    if (size != e.size_bytes) {
      report.push_back({i, e.path, VerifyIssue::size_changed});
      continue;
    }
    std::string sha;
    try {
      sha = sha256_file(e.path);
    } catch (const Error&) {
      report.push_back({i, e.path, VerifyIssue::missing});
      continue;
    }
    if (sha != e.sha256) report.push_back({i, e.path, VerifyIssue::digest_changed});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Manifest I/O

std::string manifest_line(const ManifestEntry& entry) {
  ordered_json j;
  j["path"] = entry.path.generic_string();
  j["sha256"] = entry.sha256;
  j["size_bytes"] = entry.size_bytes;
  j["label"] = std::string(to_string(entry.label));
  j["family"] = entry.family ? ordered_json(*entry.family) : ordered_json(nullptr);
  j["split"] = entry.split ? ordered_json(std::string(to_string(*entry.split))) : ordered_json(nullptr);
  if (entry.image) {
    ordered_json img;
    img["payload_len"] = entry.image->payload_len;
    img["layout"] = entry.image->layout;
    img["coloring"] = entry.image->coloring;
    img["order"] = entry.image->order;
    img["source_sha256"] = entry.image->source_sha256;
    img["file"] = entry.image->file;
    j["image"] = std::move(img);
  }
  return j.dump();
}

ManifestEntry parse_manifest_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed manifest line: ") + e.what());
  }
  try {
    ManifestEntry e;
    e.path = j.at("path").get<std::string>();
    e.sha256 = j.at("sha256").get<std::string>();
    e.size_bytes = j.at("size_bytes").get<std::uint64_t>();
    e.label = parse_label(j.at("label").get<std::string>());
    if (j.contains("family") && !j["family"].is_null()) e.family = j["family"].get<std::string>();
    if (j.contains("split") && !j["split"].is_null()) e.split = parse_split(j["split"].get<std::string>());
    if (j.contains("image") && j["image"].is_object()) {
      const auto& img = j["image"];
      ImageSidecar s;
      s.payload_len = img.at("payload_len").get<std::uint64_t>();
      s.layout = img.at("layout").get<std::string>();
      s.coloring = img.at("coloring").get<std::string>();
      s.order = img.at("order").get<unsigned>();
      s.source_sha256 = img.at("source_sha256").get<std::string>();
      s.file = img.value("file", std::string{});
      e.image = std::move(s);
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("manifest line is missing a field: ") + ex.what());
  }
}

void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries) {
  for (const auto& e : entries) out << manifest_line(e) << '\n';
}

void write_manifest(const fs::path& path, std::span<const ManifestEntry> entries) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    write_manifest(out, entries);
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<ManifestEntry> read_manifest(std::istream& in) {
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_manifest_line(line));
  }
  return out;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  return read_manifest(in);
}

}  // namespace bytegan
