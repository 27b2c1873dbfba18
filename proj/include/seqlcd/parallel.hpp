#pragma once

#include <cstddef>
#include <functional>

namespace seqlcd {

/// Upper bound on worker threads used inside the library. Defaults to the
/// SEQLCD_THREADS environment variable, else the hardware concurrency.
unsigned thread_cap();
void set_thread_cap(unsigned threads);

/// Runs body(i) for i in [begin, end) over up to thread_cap() workers using a
/// static contiguous partition. Each index is visited exactly once; callers
/// must write only to index-owned state.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace seqlcd
