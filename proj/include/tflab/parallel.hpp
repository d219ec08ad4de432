#pragma once

#include <cstddef>
#include <functional>

namespace tflab
{
    /// Global cap on worker threads used by data-parallel loops (0 = hardware concurrency).
    void set_max_threads(unsigned n) noexcept;
    unsigned max_threads() noexcept;

    /// Runs body(i) for i in [0, n). Each index is handled by exactly one worker;
    /// results must be written to index-addressed storage so the outcome does not
    /// depend on scheduling.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
}  // namespace tflab
