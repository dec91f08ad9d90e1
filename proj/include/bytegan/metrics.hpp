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

// Threshold metrics for anomaly scores. Malicious is the positive class and a
// sample is predicted malicious when score >= threshold.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bytegan/common.hpp"

namespace bytegan {

struct ScoredSample {
  std::string sample_id;
  double score = 0.0;
  Label label = Label::benign;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;   // (0,0) first, (1,1) last
  std::vector<double> thresholds;  // thresholds[i] produced points[i + 1]
};

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
};

struct ThresholdChoice {
  double threshold = 0.0;
  double value = 0.0;
};

/// Sweeps the distinct scores from high to low. Throws "degenerate ROC" unless
/// both classes are present.
RocCurve roc_curve(std::span<const ScoredSample> samples);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

ConfusionCounts confusion_counts(std::span<const ScoredSample> samples, double threshold);
double balanced_accuracy(const ConfusionCounts& counts);
double balanced_accuracy(std::span<const ScoredSample> samples, double threshold);

/// Best balanced accuracy over every distinct score used as threshold; ties go
/// to the lowest threshold.
ThresholdChoice best_balanced_accuracy(std::span<const ScoredSample> samples);

}  // namespace bytegan
