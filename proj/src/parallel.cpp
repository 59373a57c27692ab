#include "pitest/parallel.hpp"

#include <omp.h>

#include <exception>
#include <vector>

namespace pitest {

int default_workers()
{
    return omp_get_max_threads();
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task)
{
    if (workers <= 0) {
        workers = default_workers();
    }
    std::vector<std::exception_ptr> errors(count);
    const auto total = static_cast<long long>(count);
#pragma omp parallel for num_threads(workers) schedule(dynamic)
    for (long long i = 0; i < total; ++i) {
        try {
            task(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void serial_for(std::size_t count, const std::function<void(std::size_t)>& task)
{
    for (std::size_t i = 0; i < count; ++i) {
        task(i);
    }
}

} // namespace pitest
