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

#include "maskdet/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace maskdet {
namespace {

std::atomic<int> g_override{-1};
thread_local bool t_serial = false;

int hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace

int resolve_thread_count(const char* value) {
  if (value == nullptr || *value == '\0') return hardware_threads();
  std::string s(value);
  if (s == "auto") return hardware_threads();
  std::size_t pos = 0;
  int n = 0;
  try {
    n = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid thread count '" + s + "'");
  }
  if (pos != s.size() || n < 0) {
    throw std::invalid_argument("invalid thread count '" + s + "'");
  }
  return n == 0 ? hardware_threads() : n;
}

int num_threads() {
  int o = g_override.load();
  if (o >= 0) return o == 0 ? hardware_threads() : o;
  return resolve_thread_count(std::getenv("MASKDET_THREADS"));
}

void set_num_threads(int n) {
  if (n < 0) throw std::invalid_argument("thread count must be >= 0");
  g_override.store(n);
}

void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& fn) {
  if (end <= begin) return;
  int total = end - begin;
  int workers = t_serial ? 1 : std::min(num_threads(), total);
  if (workers <= 1) {
    fn(begin, end);
    return;
  }
  int chunk = (total + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run = [&](int b, int e) {
    try {
      SerialScope serial;
      fn(b, e);
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };
  for (int w = 1; w < workers; ++w) {
    int b = begin + w * chunk;
    int e = std::min(end, b + chunk);
    if (b >= e) break;
    pool.emplace_back(run, b, e);
  }
  run(begin, std::min(end, begin + chunk));
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SerialScope::SerialScope() : previous_(t_serial) { t_serial = true; }
SerialScope::~SerialScope() { t_serial = previous_; }

}  // namespace maskdet
