#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "acb/harness.hpp"

namespace acb::harness {

ReplicateExecutor pool_executor(std::size_t jobs) {
    if (jobs <= 1) return serial_executor();
    return [jobs](std::size_t count, const std::function<void(std::size_t)>& body) {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;
        const auto work = [&] {
            for (;;) {
                if (failed.load()) return;
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed = true;
                    return;
                }
            }
        };
        std::vector<std::thread> workers;
        const std::size_t spawn = std::min(jobs, count);
        workers.reserve(spawn);
        for (std::size_t w = 0; w < spawn; ++w) workers.emplace_back(work);
        for (auto& t : workers) t.join();
        if (error) std::rethrow_exception(error);
    };
}

}  // namespace acb::harness
