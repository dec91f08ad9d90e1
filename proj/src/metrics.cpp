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

#include "bytegan/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace bytegan {

namespace {

struct ClassTotals {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

ClassTotals count_classes(std::span<const ScoredSample> samples, const char* what) {
  ClassTotals t;
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) throw Error("non-finite score for sample '" + s.sample_id + "'");
    (s.label == Label::malicious ? t.pos : t.neg) += 1;
  }
  if (t.pos == 0 || t.neg == 0) throw Error(what);
  return t;
}

}  // namespace

RocCurve roc_curve(std::span<const ScoredSample> samples) {
  const ClassTotals totals = count_classes(samples, "degenerate ROC: both classes are required");
  std::vector<const ScoredSample*> order;
  order.reserve(samples.size());
  for (const auto& s : samples) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const ScoredSample* a, const ScoredSample* b) { return a->score > b->score; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = order[i]->score;
    // Every sample tied at this score flips to positive together.
    for (; i < order.size() && order[i]->score == threshold; ++i) {
      (order[i]->label == Label::malicious ? tp : fp) += 1;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(totals.neg),
                            static_cast<double>(tp) / static_cast<double>(totals.pos)});
    curve.thresholds.push_back(threshold);
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return std::clamp(area, 0.0, 1.0);
}

ConfusionCounts confusion_counts(std::span<const ScoredSample> samples, double threshold) {
  ConfusionCounts c;
  for (const auto& s : samples) {
    const bool predicted = s.score >= threshold;
    if (s.label == Label::malicious) {
      (predicted ? c.tp : c.fn) += 1;
    } else {
      (predicted ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double balanced_accuracy(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0 || c.tn + c.fp == 0) {
    throw Error("balanced accuracy needs both classes");
  }
  const double tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  return 0.5 * (tpr + tnr);
}

double balanced_accuracy(std::span<const ScoredSample> samples, double threshold) {
  count_classes(samples, "balanced accuracy needs both classes");
  return balanced_accuracy(confusion_counts(samples, threshold));
}

ThresholdChoice best_balanced_accuracy(std::span<const ScoredSample> samples) {
  const ClassTotals totals = count_classes(samples, "balanced accuracy needs both classes");
  std::vector<const ScoredSample*> order;
  order.reserve(samples.size());
  for (const auto& s : samples) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const ScoredSample* a, const ScoredSample* b) { return a->score < b->score; });

  // Ascending sweep: at threshold t every sample with score >= t is positive.
  // tp*neg + tn*pos is balanced accuracy scaled by 2*pos*neg, compared exactly.
  std::uint64_t tp = totals.pos;
  std::uint64_t tn = 0;
  std::uint64_t best_key = 0;
  ThresholdChoice best;
  bool have = false;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = order[i]->score;
    const std::uint64_t key = tp * totals.neg + tn * totals.pos;
    if (!have || key > best_key) {
      best_key = key;
      best.threshold = threshold;
      have = true;
    }
    for (; i < order.size() && order[i]->score == threshold; ++i) {
      if (order[i]->label == Label::malicious) {
        --tp;
      } else {
        ++tn;
      }
    }
  }
  best.value = balanced_accuracy(confusion_counts(samples, best.threshold));
  return best;
}

}  // namespace bytegan
