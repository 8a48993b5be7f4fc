#pragma once

// Internal chunked element loop. Workers fill disjoint index ranges of
// preallocated buffers; any reduction over the results happens serially
// in index order afterwards, so output bits do not depend on the thread
// count.

#include <thread>
#include <vector>

#include "wsturm/parallel.hpp"

namespace wsturm::detail {

template <class Body>
void parallel_for(int n, Body&& body) {
    int workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int begin = w * chunk;
        int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (int i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace wsturm::detail
