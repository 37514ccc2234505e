#include "parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace psfs {

namespace {

std::atomic<int> g_threads{0};

int effective_threads() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
  }
  return n;
}

// Minimal persistent pool: workers pick chunk indices off a shared counter.
class Pool {
 public:
  explicit Pool(int workers) {
    for (int i = 0; i < workers; ++i)
      threads_.emplace_back([this] { worker_loop(); });
  }

  ~Pool() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(int tasks, const std::function<void(int)>& fn) {
    std::unique_lock<std::mutex> lock(mutex_);
    fn_ = &fn;
    next_task_ = 0;
    tasks_ = tasks;
    pending_ = tasks;
    ++generation_;
    wake_.notify_all();
    // The caller participates too.
    work(lock);
    done_.wait(lock, [this] { return pending_ == 0; });
    fn_ = nullptr;
  }

 private:
  void worker_loop() {
    std::unique_lock<std::mutex> lock(mutex_);
    long long seen = generation_;
    for (;;) {
      wake_.wait(lock, [&] { return stop_ || (generation_ != seen && next_task_ < tasks_); });
      if (stop_) return;
      seen = generation_;
      work(lock);
    }
  }

  void work(std::unique_lock<std::mutex>& lock) {
    while (next_task_ < tasks_) {
      const int task = next_task_++;
      const auto* fn = fn_;
      lock.unlock();
      (*fn)(task);
      lock.lock();
      if (--pending_ == 0) done_.notify_all();
    }
  }

  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  std::vector<std::thread> threads_;
  const std::function<void(int)>* fn_ = nullptr;
  int next_task_ = 0;
  int tasks_ = 0;
  int pending_ = 0;
  long long generation_ = 0;
  bool stop_ = false;
};

Pool& pool() {
  static Pool instance(7);  // callers beyond 8 threads still share 8 lanes
  return instance;
}

}  // namespace

void set_thread_count(int n) {
  if (n < 0) throw InvalidArgument("set_thread_count: negative thread count");
  g_threads.store(n, std::memory_order_relaxed);
}

int thread_count() { return effective_threads(); }

void parallel_rows(int rows, const std::function<void(int, int)>& fn) {
  if (rows <= 0) return;
  const int threads = std::min(effective_threads(), rows);
  if (threads == 1 || rows < 16) {
    fn(0, rows);
    return;
  }
  const int chunk = (rows + threads - 1) / threads;
  const int tasks = (rows + chunk - 1) / chunk;
  pool().run(tasks, [&](int t) {
    const int begin = t * chunk;
    const int end = std::min(rows, begin + chunk);
    if (begin < end) fn(begin, end);
  });
}

}  // namespace psfs
