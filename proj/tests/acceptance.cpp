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

// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [--only 1,2,9] [--work-dir DIR]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "bytegan/ablation.hpp"
#include "bytegan/corpus.hpp"
#include "bytegan/extract.hpp"
#include "bytegan/hilbert.hpp"
#include "bytegan/imgcode.hpp"
#include "bytegan/metrics.hpp"
#include "bytegan/pipeline.hpp"
#include "bytegan/png_io.hpp"
#include "bytegan/synth.hpp"
#include "bytegan/train.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace fs = std::filesystem;
using namespace bytegan;
namespace oracle = bytegan::testing_oracles;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << std::fixed << v;
  return s.str();
}

// --- 1 -----------------------------------------------------------------------

Verdict palette_exactness() {
  const std::uint8_t table[16][3] = {
      {0, 0, 0},       {128, 0, 0},    {154, 99, 36},  {128, 128, 0},
      {70, 153, 144},  {0, 0, 117},    {230, 25, 75},  {245, 130, 49},
      {255, 225, 25},  {191, 239, 69}, {60, 180, 75},  {66, 212, 244},
      {67, 99, 216},   {145, 30, 180}, {240, 50, 230}, {255, 255, 255},
  };
  int matches = 0;
  for (int i = 0; i < 16; ++i) {
    matches += Palette::standard()[static_cast<std::uint8_t>(i)] == Rgb{table[i][0], table[i][1], table[i][2]};
  }
  return {matches == 16, std::to_string(matches) + "/16 rows match"};
}

// --- 2 -----------------------------------------------------------------------

Verdict hilbert_correctness() {
  const auto t0 = Clock::now();
  bool ok = true;
  for (unsigned n = 1; n <= 8 && ok; ++n) {
    const HilbertOrder o(n);
    std::vector<bool> seen(o.capacity(), false);
    GridPoint prev{};
    for (std::uint64_t d = 0; d < o.capacity(); ++d) {
      const auto p = hilbert_d2xy(o, d);
      const std::uint64_t cell = static_cast<std::uint64_t>(p.y) * o.side() + p.x;
      if (seen[cell] || hilbert_xy2d(o, p.x, p.y) != d) ok = false;
      seen[cell] = true;
      if (d > 0) {
        const auto manhattan = std::abs(static_cast<long>(p.x) - static_cast<long>(prev.x)) +
                               std::abs(static_cast<long>(p.y) - static_cast<long>(prev.y));
        if (manhattan != 1) ok = false;
      }
      prev = p;
    }
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 1.0, "orders 1-8 bijective and unit-step, " + fmt(secs, 3) + " s"};
}

// --- 3 -----------------------------------------------------------------------

Verdict locality() {
  const auto t0 = Clock::now();
  const double hil = oracle::mean_offset_distance(5, 64, true);
  const double row = oracle::mean_offset_distance(5, 64, false);
  const double secs = seconds_since(t0);
  return {hil < row && secs < 1.0,
          "order 5, offset 64: hilbert " + fmt(hil) + " vs row-major " + fmt(row) + " (" +
              "offset 8: hilbert " + fmt(oracle::mean_offset_distance(5, 8, true)) + " vs row-major " +
              fmt(oracle::mean_offset_distance(5, 8, false)) + ")"};
}

// --- 4 -----------------------------------------------------------------------

Verdict archival_round_trip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    NibbleStream s;
    s.symbols.resize(1 + rng() % 10000);
    for (auto& v : s.symbols) v = static_cast<std::uint8_t>(rng() % 16);
    ok += decode_image(encode_image(s, Layout::hilbert)).symbols == s.symbols;
  }
  const double secs = seconds_since(t0);
  return {ok == 1000 && secs < 10.0, std::to_string(ok) + "/1000 streams, " + fmt(secs, 2) + " s"};
}

// --- 5 -----------------------------------------------------------------------

Verdict throughput(const fs::path& work) {
  const fs::path input = work / "throughput.bin";
  {
    std::vector<std::uint8_t> data(50ull * 1024 * 1024);
    std::mt19937_64 rng(5);
    for (std::size_t i = 0; i < data.size(); i += 8) {
      const auto v = rng();
      std::memcpy(data.data() + i, &v, std::min<std::size_t>(8, data.size() - i));
    }
    std::ofstream(input, std::ios::binary).write(reinterpret_cast<const char*>(data.data()), data.size());
  }
  const fs::path out = work / "throughput.png";
  const auto t0 = Clock::now();
  const auto stream = bytes_to_nibbles(read_file_bytes(input));
  write_archival_png(stream, Layout::hilbert, out);
  const double secs = seconds_since(t0);
  const auto png_mb = static_cast<double>(fs::file_size(out)) / (1024.0 * 1024.0);
  fs::remove(input);
  fs::remove(out);
  return {secs <= 6.0, "50 MB random file -> Hilbert RGB PNG in " + fmt(secs, 2) + " s (gate 6 s, target 3 s), png " +
                           fmt(png_mb, 1) + " MB"};
}

// --- 6 -----------------------------------------------------------------------

Verdict metric_oracles() {
  const auto t0 = Clock::now();
  double worst_auc = 0.0, worst_bal = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = oracle::random_score_set(1000 + seed);
    worst_auc = std::max(worst_auc, std::abs(auc(roc_curve(s)) - oracle::mann_whitney(s)));
    for (const auto& x : s) {
      worst_bal = std::max(worst_bal, std::abs(balanced_accuracy(s, x.score) - oracle::direct_balacc(s, x.score)));
    }
    const auto best = best_balanced_accuracy(s);
    worst_bal = std::max(worst_bal, std::abs(best.value - oracle::best_balacc_by_enumeration(s).second));
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "100 sets, max |AUC - pair count| " << worst_auc << ", max |BalAcc - direct| " << worst_bal << ", "
    << fmt(secs, 2) << " s";
  return {worst_auc <= 1e-12 && worst_bal <= 1e-12 && secs < 5.0, d.str()};
}

// --- 7 -----------------------------------------------------------------------

Verdict gradient_checks() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool nonzero = true;
  for (std::uint64_t draw = 0; draw < 20; ++draw) {
    const auto r = oracle::check_loss_gradients(500 + draw);
    worst = std::max({worst, r.critic.relative_error, r.eg.relative_error});
    nonzero = nonzero && r.critic.analytic_norm > 0 && r.eg.analytic_norm > 0;
  }
  torch::manual_seed(0);
  const auto params = CBiGAN(oracle::miniature_config()).parameter_count();
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "20 draws, " << params << " parameters, worst relative error " << worst << ", " << fmt(secs, 1) << " s";
  return {worst <= 1e-3 && nonzero && params <= 500 && secs < 60.0, d.str()};
}

// --- 8 -----------------------------------------------------------------------

Verdict ema_closed_form() {
  auto shadow = torch::zeros({1}, torch::kFloat64);
  const auto one = torch::ones({1}, torch::kFloat64);
  double worst = 0.0;
  for (int k = 1; k <= 100; ++k) {
    ema_update(shadow, one, 0.9);
    worst = std::max(worst, std::abs(shadow.item<double>() - (1.0 - std::pow(0.9, k))));
  }
  std::ostringstream d;
  d << "k = 1..100, max error " << worst;
  return {worst <= 1e-10, d.str()};
}

// --- 9 to 12 ----------------------------------------------------------------

struct Experiment {
  std::vector<ManifestEntry> entries;
  TrainConfig cfg;
  std::vector<LabeledInput> train_set, test_set;
  TrainResult first;
  std::string first_log;
  double first_secs = 0.0;
  bool ready = false;
};

void prepare_experiment(Experiment& ex, const fs::path& work) {
  SynthSpec spec;  // 400 benign + 400 anomalous, seed 7
  ex.entries = synth_corpus(spec, work / "synthetic");
  apply_splits(ex.entries, split_manifest(ex.entries, {}, 42));
  ex.cfg = desk_preset();
  const auto res = static_cast<std::uint32_t>(ex.cfg.model.resolution);
  ex.train_set = load_inputs(ex.entries, Split::train, ex.cfg.encoding, res, 1);
  ex.test_set = load_inputs(ex.entries, Split::test, ex.cfg.encoding, res, 1);
}

TrainResult run_training(const Experiment& ex, std::string& log_text, double& secs) {
  std::ostringstream log;
  TrainSinks sinks;
  sinks.log = &log;
  sinks.progress = &std::cerr;
  const auto t0 = Clock::now();
  auto r = train(ex.cfg, ex.train_set, ex.test_set, sinks);
  secs = seconds_since(t0);
  log_text = log.str();
  return r;
}

Verdict one_class_experiment(Experiment& ex, const fs::path& work) {
  prepare_experiment(ex, work);
  ex.first = run_training(ex, ex.first_log, ex.first_secs);
  ex.ready = true;
  save_checkpoint(ex.first.best, work / "best.ckpt");
  save_checkpoint(ex.first.final, work / "final.ckpt");
  std::ofstream(work / "train.log.jsonl") << ex.first_log;
  const auto& b = ex.first.best_eval;
  const auto& last = ex.first.log.back();
  std::ostringstream d;
  d << "train " << ex.train_set.size() << ", test " << ex.test_set.size() << "; best step " << ex.first.best_step
    << " AUC " << fmt(b.auc) << " BalAcc " << fmt(b.balacc) << "; final AUC " << fmt(last.eval_auc.value_or(0))
    << " BalAcc " << fmt(last.eval_balacc.value_or(0)) << "; " << fmt(ex.first_secs / 60.0, 1) << " min";
  return {b.auc >= 0.90 && b.balacc >= 0.85 && ex.first_secs <= 30 * 60, d.str()};
}

Verdict ablation_ordering(Experiment& ex) {
  if (!ex.ready) return {false, "needs criterion 9"};
  AblationOptions opts;
  opts.progress = &std::cerr;
  const auto row = run_ablation_row(ex.entries, {Layout::row_major, Coloring::greyscale}, ex.cfg, opts);
  if (!row.ok) return {false, "row-major greyscale run failed: " + row.error};
  const double rgb = ex.first.best_eval.auc;
  return {rgb >= row.eval.auc, "hilbert.rgb AUC " + fmt(rgb) + " vs rowmajor.greyscale AUC " + fmt(row.eval.auc) +
                                   " (seed " + std::to_string(row.seed) + " for both)"};
}

Verdict checkpoint_coherence(Experiment& ex, const fs::path& work) {
  if (!ex.ready) return {false, "needs criterion 9"};
  const auto ckpt = load_checkpoint(work / "best.ckpt");
  const auto model = model_from_checkpoint(ckpt);
  const auto scores = score_split(*model, ex.test_set, {ex.cfg.lambda}, ex.cfg.score_chunk);
  const double rescored = evaluate_scores(scores).auc;
  std::ostringstream d;
  d.precision(17);
  d << "logged best AUC " << ex.first.best_eval.auc << ", rescored " << rescored;
  return {rescored == ex.first.best_eval.auc, d.str()};
}

Verdict determinism(Experiment& ex) {
  if (!ex.ready) return {false, "needs criterion 9"};
  std::string log;
  double secs = 0.0;
  const auto second = run_training(ex, log, secs);
  const bool same_log = log == ex.first_log;
  const bool same_best = tensors_digest(second.best.tensors) == tensors_digest(ex.first.best.tensors);
  const bool same_final = tensors_digest(second.final.tensors) == tensors_digest(ex.first.final.tensors);
  const auto first_model = model_from_checkpoint(ex.first.final);
  const auto second_model = model_from_checkpoint(second.final);
  const bool same_params = parameter_digest(*first_model) == parameter_digest(*second_model);
  std::ostringstream d;
  d << "log " << (same_log ? "identical" : "differs") << " (" << std::count(log.begin(), log.end(), '\n')
    << " lines), best checkpoint digest " << (same_best ? "identical" : "differs") << ", final digest "
    << (same_final ? "identical" : "differs") << ", final parameter digest "
    << parameter_digest(*second_model).substr(0, 16) << (same_params ? " (match)" : " (mismatch)");
  return {same_log && same_best && same_final && same_params, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  fs::path work_dir;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) only.insert(std::stoi(item));
    } else if (a == "--work-dir" && i + 1 < argc) {
      work_dir = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only 1,2,...] [--work-dir DIR]\n";
      return 2;
    }
  }
  torch::set_num_threads(1);
  oracle::TempDir scratch;
  const fs::path work = work_dir.empty() ? scratch.path() : work_dir;
  fs::create_directories(work);

  Experiment ex;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"palette exactness", palette_exactness},
      {"hilbert correctness", hilbert_correctness},
      {"locality superiority", locality},
      {"lossless archival round-trip", archival_round_trip},
      {"throughput gate", [&] { return throughput(work); }},
      {"metric oracles", metric_oracles},
      {"gradient checks", gradient_checks},
      {"EMA closed form", ema_closed_form},
      {"synthetic one-class experiment", [&] { return one_class_experiment(ex, work); }},
      {"ablation ordering", [&] { return ablation_ordering(ex); }},
      {"checkpoint coherence", [&] { return checkpoint_coherence(ex, work); }},
      {"determinism", [&] { return determinism(ex); }},
  };
  // Criteria 10 to 12 reuse the run of criterion 9.
  if (!only.empty() && (only.count(10) || only.count(11) || only.count(12))) only.insert(9);

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("[%s] %2d. %s: %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
