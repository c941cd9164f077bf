/* Copyright 2026 The KWST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef KWST_THREADING_H_
#define KWST_THREADING_H_

#include <functional>

namespace kwst {

// Worker count from KWST_THREADS (min 1); defaults to the hardware
// concurrency capped at 4.
int worker_count();

// Runs fn(i) for i in [0, n) across workers. Each index must be independent
// of the others; callers combine per-index results afterwards in index order,
// which keeps every reduction deterministic regardless of the worker count.
void parallel_for_indexed(int n, const std::function<void(int)>& fn);

}  // namespace kwst

#endif  // KWST_THREADING_H_
