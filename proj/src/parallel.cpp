#include "fpkit/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fpkit {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(size_t n, int threads,
                  const std::function<void(size_t, size_t)>& body) {
    if (n == 0) return;
    size_t workers = std::min<size_t>(static_cast<size_t>(resolve_threads(threads)), n);
    if (workers <= 1) {
        body(0, n);
        return;
    }

    size_t base = n / workers, rem = n % workers;
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto run_chunk = [&](size_t w) {
        size_t begin = w * base + std::min(w, rem);
        size_t end = begin + base + (w < rem ? 1 : 0);
        try {
            body(begin, end);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (size_t w = 1; w < workers; ++w)
        pool.emplace_back(run_chunk, w);
    run_chunk(0);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fpkit
