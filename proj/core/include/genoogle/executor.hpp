#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace genoogle {

// Fixed set of worker threads draining one FIFO queue of tasks. The first
// task to throw fails the whole batch: later tasks are dequeued but not run,
// and wait() rethrows that first exception.
class Executor {
 public:
  struct Counters {
    std::size_t enqueued = 0;
    std::size_t dequeued = 0;
    std::size_t executed = 0;
  };

  explicit Executor(unsigned workers);
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;
  ~Executor();

  void submit(std::function<void()> task);

  // Blocks until every submitted task has been dequeued and finished.
  void wait();

  Counters counters() const;
  unsigned worker_count() const noexcept { return static_cast<unsigned>(threads_.size()); }

 private:
  void run(std::stop_token stop);

  mutable std::mutex mutex_;
  std::condition_variable_any work_ready_;
  std::condition_variable idle_;
  std::deque<std::function<void()>> queue_;
  std::size_t in_flight_ = 0;
  Counters counters_;
  std::exception_ptr first_error_;
  std::vector<std::jthread> threads_;
};

// Append-only collection shared by concurrent producers.
template <typename T>
class SharedCollection {
 public:
  void append(T value) {
    std::lock_guard lock(mutex_);
    items_.push_back(std::move(value));
  }

  void append(std::vector<T> values) {
    std::lock_guard lock(mutex_);
    for (auto& v : values) items_.push_back(std::move(v));
  }

  std::vector<T> take() {
    std::lock_guard lock(mutex_);
    return std::exchange(items_, {});
  }

 private:
  std::mutex mutex_;
  std::vector<T> items_;
};

}  // namespace genoogle
