// Copyright 2026 The qwalk Authors
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qwalk::detail {

/// Worker cap read once from QWALK_THREADS (default 1).
inline unsigned threadCount() {
    static const unsigned count = [] {
        const char *env = std::getenv("QWALK_THREADS");
        if (env == nullptr) return 1u;
        const long v = std::strtol(env, nullptr, 10);
        return v < 1 ? 1u : static_cast<unsigned>(std::min<long>(v, 256));
    }();
    return count;
}

inline constexpr std::size_t kParallelGrain = 1 << 15;

/// Runs body(begin, end) over [0, count) in contiguous chunks. Chunks touch
/// disjoint branch ranges, so the result equals the sequential loop.
template <class Body>
void parallelFor(std::size_t count, Body &&body) {
    const unsigned threads = threadCount();
    if (threads <= 1 || count < kParallelGrain) {
        body(std::size_t{0}, count);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(threads, (count + kParallelGrain - 1) / kParallelGrain);
    const std::size_t step = (count + chunks - 1) / chunks;
    std::exception_ptr failure;
    std::mutex failureMutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t begin = c * step;
            const std::size_t end = std::min(count, begin + step);
            if (begin >= end) break;
            workers.emplace_back([&, begin, end] {
                try {
                    body(begin, end);
                } catch (...) {
                    std::lock_guard lock(failureMutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace qwalk::detail
