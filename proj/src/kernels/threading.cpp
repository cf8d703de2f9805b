#include "panogan/core/threading.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace panogan {

namespace {
std::atomic<int> g_threads{0};  // 0 = not set yet, use hardware count
}

void set_num_threads(int n) { g_threads.store(std::max(1, n)); }

int num_threads() {
    int n = g_threads.load();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 1;
}

}  // namespace panogan
