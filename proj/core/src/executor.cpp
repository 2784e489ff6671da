#include "genoogle/executor.hpp"

#include <algorithm>

namespace genoogle {

Executor::Executor(unsigned workers) {
  threads_.reserve(std::max(1u, workers));
  for (unsigned i = 0; i < std::max(1u, workers); ++i)
    threads_.emplace_back([this](std::stop_token stop) { run(stop); });
}

Executor::~Executor() {
  for (auto& t : threads_) t.request_stop();
  work_ready_.notify_all();
}

void Executor::submit(std::function<void()> task) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(task));
    ++counters_.enqueued;
  }
  work_ready_.notify_one();
}

void Executor::wait() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return queue_.empty() && in_flight_ == 0; });
  if (first_error_) std::rethrow_exception(std::exchange(first_error_, nullptr));
}

Executor::Counters Executor::counters() const {
  std::lock_guard lock(mutex_);
  return counters_;
}

void Executor::run(std::stop_token stop) {
  for (;;) {
    std::function<void()> task;
    bool skip;
    {
      std::unique_lock lock(mutex_);
      if (!work_ready_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
      task = std::move(queue_.front());
      queue_.pop_front();
      ++counters_.dequeued;
      ++in_flight_;
      skip = first_error_ != nullptr;
    }
    std::exception_ptr error;
    if (!skip) {
      try {
        task();
      } catch (...) {
        error = std::current_exception();
      }
    }
    {
      std::lock_guard lock(mutex_);
      if (!skip && !error) ++counters_.executed;
      if (error && !first_error_) first_error_ = error;
      --in_flight_;
      if (queue_.empty() && in_flight_ == 0) idle_.notify_all();
    }
  }
}

}  // namespace genoogle
