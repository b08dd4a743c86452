#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace matbf {

/// Caps worker threads for the lifetime of the object (0 = library default).
class ThreadLimit {
 public:
  explicit ThreadLimit(int threads);
  ~ThreadLimit();
  ThreadLimit(const ThreadLimit&) = delete;
  ThreadLimit& operator=(const ThreadLimit&) = delete;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs body(i) for i in [0, count). Results must be written to per-index
/// slots; ordering of calls is unspecified.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Thread count from MATBF_THREADS, or 0 when unset or invalid.
int threads_from_env();

}  // namespace matbf
