#include "sisde/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace sisde {

unsigned resolve_workers(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

PathFailure::PathFailure(std::size_t path, std::exception_ptr cause)
    : Error([&] {
        std::string what = "path " + std::to_string(path) + " failed";
        try {
          std::rethrow_exception(cause);
        } catch (const std::exception& e) {
          what += ": ";
          what += e.what();
        } catch (...) {
        }
        return what;
      }()),
      path_(path),
      cause_(std::move(cause)) {}

void run_blocks(std::size_t blocks, unsigned workers,
                const std::function<std::optional<std::pair<std::size_t, std::exception_ptr>>(
                    std::size_t)>& body) {
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed_block{kNone};
  std::mutex failure_mutex;
  std::size_t failure_block = kNone;
  std::size_t failure_path = 0;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks || b > failed_block.load()) return;
      auto result = body(b);
      if (!result) continue;
      std::lock_guard lock(failure_mutex);
      if (b < failure_block) {
        failure_block = b;
        failure_path = result->first;
        failure = result->second;
        failed_block.store(b);
      }
    }
  };

  const unsigned n = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(blocks, 1));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(n);
    for (unsigned i = 0; i < n; ++i) threads.emplace_back(worker);
  }
  if (failure) throw PathFailure(failure_path, failure);
}

}  // namespace sisde
