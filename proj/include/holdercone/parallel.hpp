#pragma once

#include <cstddef>
#include <functional>

namespace holdercone {

/// Worker count for grid sweeps: the value of HOLDERCONE_THREADS when it is
/// a positive integer, otherwise std::thread::hardware_concurrency(), and
/// never less than one.
unsigned worker_count();

/// Splits [0, n) into contiguous blocks and runs body(block_index, begin,
/// end) on up to worker_count() threads. Block boundaries depend only on n
/// and the block count, so callers that reduce per-block results in block
/// order get the same answer for any thread count. Calls made from inside
/// a worker run their blocks serially on that worker.
void parallel_blocks(std::size_t n, std::size_t blocks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace holdercone
