// Internal worker pool for experiment tasks. Results must be written to
// per-task slots so the outcome is independent of scheduling.
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>

namespace mag::detail {

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mag::detail
