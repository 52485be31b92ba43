#pragma once

#include <cstddef>
#include <functional>

namespace ising {

/// 0 means machine parallelism.
unsigned resolve_threads(unsigned requested);

/// Runs body(shard) for every shard in [0, shards) on up to `threads` workers.
/// Shards are claimed dynamically; callers own per-shard output slots and
/// combine them in shard order, so results never depend on the worker count.
void run_shards(std::size_t shards, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace ising
