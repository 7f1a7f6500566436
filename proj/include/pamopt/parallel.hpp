// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

namespace pamopt {

// Worker count is process-global. 0 restores the hardware default.
// All parallel loops in this library are written so that results are
// identical for any worker count: chunk boundaries depend only on the
// iteration range, never on how many threads execute them.
void set_worker_count(int n);
int worker_count();

namespace detail {
void parallel_chunks_impl(std::int64_t begin, std::int64_t end, std::int64_t grain,
                          const std::function<void(std::int64_t, std::int64_t)>& body);
}

/// Runs body(chunk_begin, chunk_end) over fixed-size chunks of [begin, end).
template <class F>
void parallel_chunks(std::int64_t begin, std::int64_t end, std::int64_t grain, F&& body) {
  detail::parallel_chunks_impl(begin, end, grain,
                               std::function<void(std::int64_t, std::int64_t)>(std::forward<F>(body)));
}

/// Runs body(i) for every i in [begin, end).
template <class F>
void parallel_for(std::int64_t begin, std::int64_t end, F&& body, std::int64_t grain = 1024) {
  detail::parallel_chunks_impl(begin, end, grain, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) body(i);
  });
}

}  // namespace pamopt
