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

// Reference implementations used only by tests. Each one is written the slow,
// obvious way and shares no code with the library routine it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <set>
#include <utility>
#include <vector>

#include "bytegan/hilbert.hpp"
#include "bytegan/metrics.hpp"

namespace bytegan::testing_oracles {

/// Hilbert curve of order n built by quadrant recursion: a transposed copy of
/// the order n-1 curve, two translated copies, then an anti-transposed copy.
inline std::vector<GridPoint> hilbert_curve(unsigned n) {
  if (n == 1) return {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  const auto sub = hilbert_curve(n - 1);
  const std::uint32_t h = std::uint32_t{1} << (n - 1);
  std::vector<GridPoint> out;
  out.reserve(sub.size() * 4);
  for (const auto& p : sub) out.push_back({p.y, p.x});
  for (const auto& p : sub) out.push_back({p.x, p.y + h});
  for (const auto& p : sub) out.push_back({p.x + h, p.y + h});
  for (const auto& p : sub) out.push_back({h - 1 - p.y + h, h - 1 - p.x});
  return out;
}

/// Mean Euclidean distance between the cells of indices d and d + k over every
/// valid d, for the Hilbert curve or row-major order on the same square grid.
inline double mean_offset_distance(unsigned n, std::uint64_t k, bool hilbert) {
  const HilbertOrder o(n);
  double total = 0;
  std::uint64_t pairs = 0;
  for (std::uint64_t d = 0; d + k < o.capacity(); ++d) {
    GridPoint a, b;
    if (hilbert) {
      a = hilbert_d2xy(o, d);
      b = hilbert_d2xy(o, d + k);
    } else {
      a = {static_cast<std::uint32_t>(d % o.side()), static_cast<std::uint32_t>(d / o.side())};
      b = {static_cast<std::uint32_t>((d + k) % o.side()), static_cast<std::uint32_t>((d + k) / o.side())};
    }
    total += std::hypot(double(a.x) - double(b.x), double(a.y) - double(b.y));
    ++pairs;
  }
  return total / static_cast<double>(pairs);
}

/// P(score_mal > score_ben) + 0.5 P(tie), by counting every pair.
inline double mann_whitney(const std::vector<ScoredSample>& s) {
  double wins = 0;
  double pairs = 0;
  for (const auto& a : s) {
    if (a.label != Label::malicious) continue;
    for (const auto& b : s) {
      if (b.label != Label::benign) continue;
      pairs += 1;
      if (a.score > b.score) wins += 1;
      if (a.score == b.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Balanced accuracy straight from the definition.
inline double direct_balacc(const std::vector<ScoredSample>& s, double threshold) {
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (const auto& x : s) {
    const bool flagged = x.score >= threshold;
    if (x.label == Label::malicious) {
      (flagged ? tp : fn) += 1;
    } else {
      (flagged ? fp : tn) += 1;
    }
  }
  return 0.5 * (tp / (tp + fn) + tn / (tn + fp));
}

/// Every distinct score tried as a threshold; the set of (fpr, tpr) points seen.
inline std::set<std::pair<double, double>> roc_points_by_enumeration(const std::vector<ScoredSample>& s) {
  std::set<double> thresholds;
  for (const auto& x : s) thresholds.insert(x.score);
  double pos = 0, neg = 0;
  for (const auto& x : s) (x.label == Label::malicious ? pos : neg) += 1;
  std::set<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (const auto& x : s) {
      if (x.score >= t) (x.label == Label::malicious ? tp : fp) += 1;
    }
    pts.insert({fp / neg, tp / pos});
  }
  return pts;
}

/// Best balanced accuracy over all distinct scores, lowest threshold on ties.
inline std::pair<double, double> best_balacc_by_enumeration(const std::vector<ScoredSample>& s) {
  std::set<double> thresholds;
  for (const auto& x : s) thresholds.insert(x.score);
  double best_t = 0, best_v = -1;
  for (double t : thresholds) {  // ascending
    const double v = direct_balacc(s, t);
    if (v > best_v + 1e-15) {
      best_v = v;
      best_t = t;
    }
  }
  return {best_t, best_v};
}

/// Random labelled score set with at least one sample of each class; scores are
/// drawn from a small grid so ties are common.
inline std::vector<ScoredSample> random_score_set(std::uint64_t seed, std::size_t max_n = 200) {
  std::mt19937_64 rng(seed);
  const std::size_t n = 2 + rng() % (max_n - 1);
  const bool coarse = rng() % 2 == 0;
  std::vector<ScoredSample> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i].sample_id = std::to_string(i);
    s[i].label = i == 0 ? Label::benign : (i == 1 ? Label::malicious : (rng() % 3 == 0 ? Label::malicious : Label::benign));
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    s[i].score = coarse ? static_cast<double>(static_cast<int>(u * 10)) / 10.0 : u + (s[i].label == Label::malicious ? 0.2 : 0.0);
  }
  std::shuffle(s.begin(), s.end(), rng);
  return s;
}

}  // namespace bytegan::testing_oracles
