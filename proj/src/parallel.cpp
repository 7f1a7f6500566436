// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "pamopt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

namespace pamopt {
namespace {

int g_workers = 0;

int default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// A lazily created pool of persistent workers. Jobs are claims on a shared
// atomic chunk counter, so scheduling never affects which chunk computes what.
class Pool {
 public:
  static Pool& get() {
    static Pool pool;
    return pool;
  }

  void run(std::int64_t begin, std::int64_t end, std::int64_t grain,
           const std::function<void(std::int64_t, std::int64_t)>& body, int workers) {
    ensure_threads(workers - 1);
    std::unique_lock lock(mutex_);
    begin_ = begin;
    end_ = end;
    grain_ = grain;
    body_ = &body;
    cursor_.store(begin, std::memory_order_relaxed);
    active_ = std::min<int>(workers - 1, static_cast<int>(threads_.size()));
    pending_ = active_;
    ++generation_;
    lock.unlock();
    cv_.notify_all();

    work();  // the caller participates

    std::unique_lock done_lock(mutex_);
    done_cv_.wait(done_lock, [&] { return pending_ == 0; });
    body_ = nullptr;
  }

 private:
  void ensure_threads(int n) {
    std::lock_guard lock(mutex_);
    while (static_cast<int>(threads_.size()) < n) {
      threads_.emplace_back([this, id = static_cast<int>(threads_.size())] { worker_loop(id); });
    }
  }

  void worker_loop(int id) {
    std::uint64_t seen = 0;
    for (;;) {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return generation_ != seen; });
      seen = generation_;
      if (id >= active_) continue;
      lock.unlock();
      work();
      lock.lock();
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }

  void work() {
    for (;;) {
      const std::int64_t lo = cursor_.fetch_add(grain_, std::memory_order_relaxed);
      if (lo >= end_) break;
      (*body_)(lo, std::min(lo + grain_, end_));
    }
  }

  std::mutex mutex_;
  std::condition_variable cv_, done_cv_;
  std::vector<std::thread> threads_;
  const std::function<void(std::int64_t, std::int64_t)>* body_ = nullptr;
  std::atomic<std::int64_t> cursor_{0};
  std::int64_t begin_ = 0, end_ = 0, grain_ = 1;
  std::uint64_t generation_ = 0;
  int active_ = 0;
  int pending_ = 0;
};

}  // namespace

void set_worker_count(int n) { g_workers = n < 0 ? 0 : n; }

int worker_count() { return g_workers > 0 ? g_workers : default_workers(); }

namespace detail {

void parallel_chunks_impl(std::int64_t begin, std::int64_t end, std::int64_t grain,
                          const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (begin >= end) return;
  grain = std::max<std::int64_t>(grain, 1);
  const int workers = worker_count();
  if (workers <= 1 || end - begin <= grain) {
    for (std::int64_t lo = begin; lo < end; lo += grain) body(lo, std::min(lo + grain, end));
    return;
  }
  Pool::get().run(begin, end, grain, body, workers);
}

}  // namespace detail
}  // namespace pamopt
