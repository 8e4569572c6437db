// Copyright 2026 The LPIC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lpic/parallel.h"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "lpic/errors.h"

namespace lpic {

int ConfigureThreadsFromEnv() {
  if (const char* env = std::getenv("LPIC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw Error(std::string("LPIC_THREADS must be a positive integer, got '") + env + "'");
    }
    SetThreadCount(int(std::min<long>(cap, omp_get_max_threads())));
  }
  return ThreadCount();
}

void SetThreadCount(int threads) { omp_set_num_threads(std::max(1, threads)); }

int ThreadCount() { return omp_get_max_threads(); }

}  // namespace lpic
