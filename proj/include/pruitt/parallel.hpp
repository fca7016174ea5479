#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace pruitt {

// Global worker count for block-parallel loops. 0 means "hardware default".
// Results never depend on this value: blocks write to disjoint, index-addressed
// slots and reductions run in block order.
void set_worker_count(unsigned n);
unsigned worker_count();

// Partitions [0, total) into fixed-size blocks and runs
// fn(block_index, begin, end) across workers. fn must only touch state owned
// by its block index.
void parallel_blocks(std::uint64_t total, std::uint64_t block_size,
                     const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn);

std::uint64_t block_count(std::uint64_t total, std::uint64_t block_size);

}  // namespace pruitt
