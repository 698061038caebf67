// Copyright 2026 The maskdet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskdet/evaluation.h"

#include <algorithm>
#include <numeric>
#include <set>

namespace maskdet {
namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double accuracy(const ConfusionCounts& c) { return ratio(c.tp + c.tn, c.tp + c.fp + c.fn + c.tn); }
double precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }
double recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }

MatchResult match_detections(std::span<const ScoredDetection> dets,
                             std::span<const GroundTruth> gts, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  MatchResult r;
  r.gt_of_detection.assign(dets.size(), -1);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t di : order) {
    const auto& d = dets[di];
    int best = -1;
    double best_iou = iou_threshold;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (taken[gi] || gts[gi].class_id != d.class_id) continue;
      const double v = iou(d.box, gts[gi].box);
      if (v >= best_iou && (best < 0 || v > best_iou)) {
        best = static_cast<int>(gi);
        best_iou = v;
      }
    }
    if (best >= 0) {
      taken[best] = true;
      r.gt_of_detection[di] = best;
      ++r.counts.tp;
    } else {
      ++r.counts.fp;
    }
  }
  r.counts.fn = static_cast<std::uint64_t>(std::count(taken.begin(), taken.end(), false));
  return r;
}

double average_precision(std::vector<RankedMatch> matches, std::size_t num_ground_truth) {
  if (num_ground_truth == 0) return 0.0;
  std::stable_sort(matches.begin(), matches.end(),
                   [](const RankedMatch& a, const RankedMatch& b) { return a.score > b.score; });
  const std::size_t n = matches.size();
  std::vector<double> rec(n), prec(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (matches[i].true_positive) ++tp;
    rec[i] = static_cast<double>(tp) / static_cast<double>(num_ground_truth);
    prec[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n; i-- > 1;) prec[i - 1] = std::max(prec[i - 1], prec[i]);

  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    auto it = std::lower_bound(rec.begin(), rec.end(), r);
    if (it != rec.end()) sum += prec[static_cast<std::size_t>(it - rec.begin())];
  }
  return sum / 101.0;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int k = 0; k < 10; ++k) t.push_back((50 + 5 * k) / 100.0);
  return t;
}

EvalReport coco_map(std::span<const ScoredDetection> dets, std::span<const GroundTruth> gts,
                    const LabelMap& labels, std::size_t max_detections_per_image) {
  EvalReport report;
  report.iou_thresholds = coco_iou_thresholds();

  // Per image, keep the highest-scoring detections up to the cap.
  std::map<std::string, std::vector<ScoredDetection>> dets_by_image;
  std::map<std::string, std::vector<GroundTruth>> gts_by_image;
  for (const auto& d : dets) dets_by_image[d.image_id].push_back(d);
  for (const auto& g : gts) gts_by_image[g.image_id].push_back(g);
  for (auto& [id, v] : dets_by_image) {
    std::stable_sort(v.begin(), v.end(), [](const ScoredDetection& a, const ScoredDetection& b) {
      return a.score > b.score;
    });
    if (v.size() > max_detections_per_image) v.resize(max_detections_per_image);
  }
  std::set<std::string> images;
  for (const auto& [id, v] : dets_by_image) images.insert(id);
  for (const auto& [id, v] : gts_by_image) images.insert(id);

  std::set<int> classes;
  for (const auto& [id, name] : labels.items()) classes.insert(id);
  for (const auto& g : gts) classes.insert(g.class_id);

  double ap_sum = 0.0, ap50_sum = 0.0, ap75_sum = 0.0, ar_sum = 0.0;
  std::size_t evaluated = 0;
  const std::vector<ScoredDetection> no_dets;
  const std::vector<GroundTruth> no_gts;
  for (int c : classes) {
    std::size_t npos = 0;
    for (const auto& g : gts) npos += g.class_id == c;
    const std::string name = labels.name_of(c).value_or(std::to_string(c));
    if (npos == 0) continue;  // undefined AP; excluded from the mean
    std::vector<double> aps;
    double recall_sum = 0.0;
    for (double t : report.iou_thresholds) {
      std::vector<RankedMatch> ranked;
      std::size_t tp = 0;
      for (const auto& id : images) {
        auto di = dets_by_image.find(id);
        auto gi = gts_by_image.find(id);
        std::vector<ScoredDetection> cd;
        std::vector<GroundTruth> cg;
        for (const auto& d : di == dets_by_image.end() ? no_dets : di->second) {
          if (d.class_id == c) cd.push_back(d);
        }
        for (const auto& g : gi == gts_by_image.end() ? no_gts : gi->second) {
          if (g.class_id == c) cg.push_back(g);
        }
        auto m = match_detections(cd, cg, t);
        for (std::size_t k = 0; k < cd.size(); ++k) {
          ranked.push_back({cd[k].score, m.gt_of_detection[k] >= 0});
        }
        tp += m.counts.tp;
      }
      aps.push_back(average_precision(std::move(ranked), npos));
      recall_sum += static_cast<double>(tp) / static_cast<double>(npos);
    }
    ap_sum += std::accumulate(aps.begin(), aps.end(), 0.0) / static_cast<double>(aps.size());
    ap50_sum += aps[0];
    ap75_sum += aps[5];
    ar_sum += recall_sum / static_cast<double>(report.iou_thresholds.size());
    report.ap_per_class[name] = std::move(aps);
    ++evaluated;
  }
  if (evaluated > 0) {
    const double n = static_cast<double>(evaluated);
    report.map_coco = ap_sum / n;
    report.ap50 = ap50_sum / n;
    report.ap75 = ap75_sum / n;
    report.ar_max100 = ar_sum / n;
  }

  for (const auto& id : images) {
    auto di = dets_by_image.find(id);
    auto gi = gts_by_image.find(id);
    report.counts += match_detections(di == dets_by_image.end() ? no_dets : di->second,
                                      gi == gts_by_image.end() ? no_gts : gi->second, 0.5)
                         .counts;
  }
  report.precision = precision(report.counts);
  report.recall = recall(report.counts);
  report.accuracy = accuracy(report.counts);
  return report;
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"iou_thresholds", r.iou_thresholds},
          {"ap_per_class", r.ap_per_class},
          {"map", r.map_coco},
          {"ap50", r.ap50},
          {"ap75", r.ap75},
          {"ar_max100", r.ar_max100},
          {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tn", r.counts.tn}}},
          {"precision", r.precision},
          {"recall", r.recall},
          {"accuracy", r.accuracy}};
}

}  // namespace maskdet
