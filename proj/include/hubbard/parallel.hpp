#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hubbard {

// Runs body(chunk) for chunk = 0 .. chunks-1 on up to `threads` workers.
// Work is split into a fixed number of chunks that does not depend on the
// thread count, so callers that reduce per-chunk results in chunk order get
// bit-identical output for any number of threads.
template <typename Body>
void for_each_chunk(std::size_t chunks, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
            try {
                body(c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

// [begin, end) of chunk c when `count` items are split into `chunks` parts.
inline std::pair<std::size_t, std::size_t> chunk_range(std::size_t count, std::size_t chunks, std::size_t c) {
    return {count * c / chunks, count * (c + 1) / chunks};
}

}  // namespace hubbard
