#include "sigma2/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace sigma2 {

int worker_count() {
    int cap = 0;
    if (const char* env = std::getenv("SIGMA2_LAB_THREADS")) {
        try {
            cap = std::max(0, std::stoi(env));
        } catch (const std::exception&) {
            cap = 0;
        }
    }
    if (cap == 0) cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return cap;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    const std::size_t workers =
        std::min<std::size_t>(chunks, static_cast<std::size_t>(worker_count()));
    if (workers <= 1) {
        for (std::size_t b = 0; b < count; b += kChunk) body(b, std::min(count, b + kChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
            try {
                const std::size_t b = c * kChunk;
                body(b, std::min(count, b + kChunk));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace sigma2
