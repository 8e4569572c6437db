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

#ifndef LPIC_PARALLEL_H_
#define LPIC_PARALLEL_H_

namespace lpic {

// Applies the LPIC_THREADS cap (if set) to the OpenMP worker pool and
// returns the resulting worker count. Throws Error on a malformed value.
int ConfigureThreadsFromEnv();

void SetThreadCount(int threads);
int ThreadCount();

}  // namespace lpic

#endif  // LPIC_PARALLEL_H_
