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

#include "maskdet/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "maskdet/parallel.h"

namespace maskdet {

StageStats summarize(std::vector<double> s) {
  StageStats st;
  if (s.empty()) return st;
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  st.mean_ms = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
  st.median_ms = n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  st.p95_ms = s[std::max<std::size_t>(rank, 1) - 1];
  return st;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

struct Sample {
  double pre, fwd, post, total;
};

}  // namespace

BenchReport run_bench(const SsdModel& model, const std::vector<Tensor>& frames,
                      const PostprocessConfig& config, const BenchOptions& options,
                      std::vector<std::vector<Detection>>* outputs) {
  if (options.warmup < 0 || options.repeat < 1) {
    throw std::invalid_argument("bench: warmup must be >= 0 and repeat >= 1");
  }
  if (frames.empty()) throw std::invalid_argument("bench: no frames");
  config.validate();
  const auto names = default_class_names();
  const int threads = options.threads > 0 ? options.threads : num_threads();

  auto run_one = [&](const Tensor& frame) {
    return detect(frame, model, config, names);
  };
  for (int w = 0; w < options.warmup; ++w) {
    for (const auto& f : frames) run_one(f);
  }

  const std::size_t items = frames.size() * static_cast<std::size_t>(options.repeat);
  std::vector<Sample> samples(items);
  std::vector<std::vector<Detection>> last(frames.size());
  const std::size_t last_pass_begin = items - frames.size();

  // Processes work item i with stage timestamps chained from `start`.
  auto process = [&](std::size_t i, Clock::time_point start) {
    const Tensor& frame = frames[i % frames.size()];
    Tensor input = preprocess(frame, model.input_size());
    const auto t1 = Clock::now();
    RawPredictions raw = model.forward(input);
    const auto t2 = Clock::now();
    auto decoded = decode_boxes(raw, model.anchors(), model.config().head.anchors.variances);
    auto dets = postprocess(decoded, config, frame.width(), frame.height(), names);
    const auto t3 = Clock::now();
    samples[i] = {ms(start, t1), ms(t1, t2), ms(t2, t3), ms(start, t3)};
    if (i >= last_pass_begin) last[i - last_pass_begin] = std::move(dets);
    return t3;
  };

  const int workers = static_cast<int>(std::min<std::size_t>(threads, items));
  const auto begin = Clock::now();
  Clock::time_point end;
  if (workers <= 1) {
    Clock::time_point t = begin;
    for (std::size_t i = 0; i < items; ++i) t = process(i, t);
    end = t;
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<Clock::time_point> finished(workers, begin);
    std::vector<std::exception_ptr> errors(workers);
    auto worker = [&](int w) {
      SerialScope serial;
      try {
        Clock::time_point t = begin;
        for (std::size_t i; (i = next.fetch_add(1)) < items;) t = process(i, t);
        finished[w] = t;
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    end = *std::max_element(finished.begin(), finished.end());
  }

  BenchReport r;
  r.frames = items;
  r.threads = std::max(workers, 1);
  std::vector<double> pre, fwd, post, total;
  for (const auto& s : samples) {
    pre.push_back(s.pre);
    fwd.push_back(s.fwd);
    post.push_back(s.post);
    total.push_back(s.total);
  }
  r.preprocess = summarize(pre);
  r.forward = summarize(fwd);
  r.postprocess = summarize(post);
  r.total = summarize(total);
  r.total_seconds = std::chrono::duration<double>(end - begin).count();
  r.fps = r.total_seconds > 0 ? static_cast<double>(items) / r.total_seconds : 0.0;
  if (outputs) *outputs = std::move(last);
  return r;
}

nlohmann::json to_json(const BenchReport& r) {
  auto stage = [](const StageStats& s) {
    return nlohmann::json{{"mean_ms", s.mean_ms}, {"median_ms", s.median_ms}, {"p95_ms", s.p95_ms}};
  };
  return {{"frames", r.frames},
          {"threads", r.threads},
          {"preprocess", stage(r.preprocess)},
          {"forward", stage(r.forward)},
          {"postprocess", stage(r.postprocess)},
          {"total", stage(r.total)},
          {"total_seconds", r.total_seconds},
          {"fps", r.fps}};
}

std::string format_table(const BenchReport& r) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s %10s %10s %10s\n", "stage", "mean ms", "median ms", "p95 ms");
  out += buf;
  auto row = [&](const char* name, const StageStats& s) {
    std::snprintf(buf, sizeof buf, "%-12s %10.3f %10.3f %10.3f\n", name, s.mean_ms, s.median_ms, s.p95_ms);
    out += buf;
  };
  row("preprocess", r.preprocess);
  row("forward", r.forward);
  row("postprocess", r.postprocess);
  row("total", r.total);
  std::snprintf(buf, sizeof buf, "frames %zu  threads %d  wall %.3f s  fps %.3f\n", r.frames,
                r.threads, r.total_seconds, r.fps);
  out += buf;
  return out;
}

}  // namespace maskdet
