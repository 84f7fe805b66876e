#pragma once

#include <cstddef>
#include <functional>

namespace acb {

// Runs body(0), ..., body(count - 1), possibly concurrently. Bodies must
// write only to their own replicate's slot; callers reduce afterwards in
// index order, so results never depend on scheduling.
using ReplicateExecutor = std::function<void(std::size_t count, const std::function<void(std::size_t)>& body)>;

inline void run_serial(std::size_t count, const std::function<void(std::size_t)>& body) {
    for (std::size_t i = 0; i < count; ++i) body(i);
}

inline ReplicateExecutor serial_executor() { return run_serial; }

}  // namespace acb
