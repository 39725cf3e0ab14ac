#include "confrank/threads.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace confrank {

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("CONFRANK_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  unsigned cap = 0;
  try {
    cap = static_cast<unsigned>(std::stoul(env));
  } catch (...) {
    return hw;
  }
  return cap == 0 ? hw : std::min(cap, 256u);
}

void parallel_for(size_t n, const std::function<void(size_t, size_t)>& fn) {
  unsigned workers = thread_cap();
  if (n < 2048 || workers <= 1) {
    fn(0, n);
    return;
  }
  workers = static_cast<unsigned>(std::min<size_t>(workers, n));
  size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    size_t begin = static_cast<size_t>(w) * chunk;
    size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace confrank
