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

#pragma once

#include <functional>

namespace maskdet {

// Worker count used by parallel_for. Resolution order: set_num_threads(),
// then the MASKDET_THREADS environment variable, then auto. A value of 0 in
// either place means "auto" (std::thread::hardware_concurrency()).
int num_threads();
void set_num_threads(int n);

// Parses a MASKDET_THREADS-style value; 0 and "auto" mean hardware
// concurrency. Throws std::invalid_argument on garbage or negatives.
int resolve_thread_count(const char* value);

// Splits [begin, end) into contiguous chunks and runs fn(chunk_begin,
// chunk_end) on up to num_threads() workers. Each index is visited exactly
// once, so per-element results do not depend on the worker count.
void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& fn);

// While alive, parallel_for on this thread runs inline. Used when frames are
// already distributed across workers.
class SerialScope {
 public:
  SerialScope();
  ~SerialScope();
  SerialScope(const SerialScope&) = delete;
  SerialScope& operator=(const SerialScope&) = delete;

 private:
  bool previous_;
};

}  // namespace maskdet
