#pragma once

// Index-parallel map used by every grid kernel. `serial` is the reference path;
// `parallel` distributes indices over OpenMP threads. Both write results by
// index, so assembled output is identical regardless of thread count.

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kerrpair {

enum class Execution { serial, parallel };

void set_thread_count(int threads);
[[nodiscard]] int max_threads();

// Calls body(i) for i in [0, count). If any call throws, the exception from the
// lowest failing index is rethrown after the loop finishes.
template <class Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
    if (exec == Execution::serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> failures(count);
    const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            failures[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

}  // namespace kerrpair
