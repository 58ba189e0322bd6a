#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "sisde/errors.hpp"
#include "sisde/random.hpp"

namespace sisde {

/// Paths are grouped into fixed-size blocks; block contents and the merge
/// order never depend on the worker count.
inline constexpr std::size_t kPathsPerBlock = 256;

/// 0 selects the hardware concurrency.
unsigned resolve_workers(unsigned requested) noexcept;

/// Thrown when a path fails inside an ensemble. Carries the lowest failing
/// path index and the original exception.
class PathFailure : public Error {
 public:
  PathFailure(std::size_t path, std::exception_ptr cause);

  std::size_t path() const noexcept { return path_; }
  [[noreturn]] void rethrow_cause() const { std::rethrow_exception(cause_); }

 private:
  std::size_t path_;
  std::exception_ptr cause_;
};

/// Runs body(block) for every block. body returns the index of a failing path
/// together with its exception, or nothing. Blocks after the lowest failing
/// block may be skipped; the reported failure is the same for any worker count.
void run_blocks(std::size_t blocks, unsigned workers,
                const std::function<std::optional<std::pair<std::size_t, std::exception_ptr>>(
                    std::size_t)>& body);

/// Deterministic Monte Carlo reduction. per_path(index, rng, acc) folds one
/// path into a block accumulator; accumulators are merged in block order with
/// Acc::merge. Each path draws from Rng::substream(seed, index).
template <class Acc, class PathFn>
Acc reduce_paths(std::size_t paths, std::uint64_t seed, unsigned workers, const Acc& zero,
                 PathFn&& per_path) {
  const std::size_t blocks = (paths + kPathsPerBlock - 1) / kPathsPerBlock;
  std::vector<std::optional<Acc>> partial(blocks);
  run_blocks(blocks, workers,
             [&](std::size_t b) -> std::optional<std::pair<std::size_t, std::exception_ptr>> {
               Acc acc = zero;
               const std::size_t first = b * kPathsPerBlock;
               const std::size_t last = std::min(paths, first + kPathsPerBlock);
               for (std::size_t i = first; i < last; ++i) {
                 try {
                   Rng rng = Rng::substream(seed, i);
                   per_path(i, rng, acc);
                 } catch (...) {
                   return std::make_pair(i, std::current_exception());
                 }
               }
               partial[b] = std::move(acc);
               return std::nullopt;
             });
  Acc total = zero;
  for (auto& p : partial) total.merge(*p);
  return total;
}

/// Per-path results in path order.
template <class T, class PathFn>
std::vector<T> map_paths(std::size_t paths, std::uint64_t seed, unsigned workers, PathFn&& fn) {
  struct Collect {
    std::vector<T> values;
    void merge(Collect& other) {
      for (auto& v : other.values) values.push_back(std::move(v));
    }
  };
  Collect all = reduce_paths(paths, seed, workers, Collect{},
                             [&](std::size_t i, Rng& rng, Collect& acc) {
                               acc.values.push_back(fn(i, rng));
                             });
  return std::move(all.values);
}

}  // namespace sisde
