/*******************************************************************************
 * Worker pool used by all parallel phases. A pool with one worker executes
 * everything inline on the calling thread, which is what the deterministic
 * mode relies on.
 ******************************************************************************/
#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace leanpart {

class WorkerPool {
public:
  explicit WorkerPool(int workers = 0) {
    if (workers <= 0) {
      workers = static_cast<int>(std::thread::hardware_concurrency());
      if (workers <= 0) {
        workers = 1;
      }
    }
    _workers = workers;
    for (int id = 1; id < _workers; ++id) {
      _threads.emplace_back([this, id] { worker_loop(id); });
    }
  }

  WorkerPool(const WorkerPool &) = delete;
  WorkerPool &operator=(const WorkerPool &) = delete;

  ~WorkerPool() {
    {
      std::unique_lock lock(_mutex);
      _stop = true;
    }
    _start_cv.notify_all();
    for (auto &t : _threads) {
      t.join();
    }
  }

  int workers() const {
    return _workers;
  }

  // Runs job(worker_id) on every worker and blocks until all are done.
  // Worker 0 is the calling thread; the first exception thrown by any
  // worker is rethrown here. Must not be called from inside a job.
  void run(const std::function<void(int)> &job) {
    if (_workers == 1) {
      job(0);
      return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::function<void(int)> guarded = [&](const int id) {
      try {
        job(id);
      } catch (...) {
        std::unique_lock lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
      }
    };
    {
      std::unique_lock lock(_mutex);
      _job = &guarded;
      _pending = _workers - 1;
      ++_generation;
    }
    _start_cv.notify_all();
    guarded(0);
    {
      std::unique_lock lock(_mutex);
      _done_cv.wait(lock, [this] { return _pending == 0; });
      _job = nullptr;
    }
    if (error) {
      std::rethrow_exception(error);
    }
  }

private:
  void worker_loop(const int id) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)> *job = nullptr;
      {
        std::unique_lock lock(_mutex);
        _start_cv.wait(lock, [&] { return _stop || _generation != seen; });
        if (_stop) {
          return;
        }
        seen = _generation;
        job = _job;
      }
      (*job)(id);
      {
        std::unique_lock lock(_mutex);
        if (--_pending == 0) {
          _done_cv.notify_all();
        }
      }
    }
  }

  int _workers = 1;
  std::vector<std::thread> _threads;
  std::mutex _mutex;
  std::condition_variable _start_cv;
  std::condition_variable _done_cv;
  const std::function<void(int)> *_job = nullptr;
  int _pending = 0;
  std::uint64_t _generation = 0;
  bool _stop = false;
};

// Dynamic chunked loop over [begin, end); fn(worker, lo, hi) handles one
// chunk. With one worker the chunks are claimed in index order.
template <typename F>
void parallel_chunks(
    WorkerPool &pool,
    const std::uint64_t begin,
    const std::uint64_t end,
    std::uint64_t chunk,
    F &&fn
) {
  if (begin >= end) {
    return;
  }
  chunk = std::max<std::uint64_t>(1, chunk);
  if (pool.workers() == 1 || end - begin <= chunk) {
    for (std::uint64_t lo = begin; lo < end; lo += chunk) {
      fn(0, lo, std::min(end, lo + chunk));
    }
    return;
  }
  std::atomic<std::uint64_t> cursor{begin};
  pool.run([&](const int worker) {
    for (;;) {
      const std::uint64_t lo = cursor.fetch_add(chunk, std::memory_order_relaxed);
      if (lo >= end) {
        break;
      }
      fn(worker, lo, std::min(end, lo + chunk));
    }
  });
}

// Element-wise variant: fn(worker, index).
template <typename F>
void parallel_for(WorkerPool &pool, const std::uint64_t begin, const std::uint64_t end, F &&fn) {
  const std::uint64_t span = end > begin ? end - begin : 0;
  const std::uint64_t chunk = std::max<std::uint64_t>(1, span / (8 * pool.workers()));
  parallel_chunks(pool, begin, end, chunk, [&](const int worker, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      fn(worker, i);
    }
  });
}

// Atomic fetch-max, used for peak counters.
template <typename T>
void atomic_max(std::atomic<T> &target, const T value) {
  T cur = target.load(std::memory_order_relaxed);
  while (cur < value && !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
  }
}

} // namespace leanpart
