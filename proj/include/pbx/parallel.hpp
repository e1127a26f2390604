#pragma once

#include <cstddef>
#include <functional>

namespace pbx {

/// Worker count: PBX_THREADS if set and positive, else hardware concurrency.
unsigned thread_budget();

/// Runs body(i) for i in [0, n) on up to thread_budget() threads. Each index
/// must write only its own output slot; reductions happen afterwards in a
/// fixed order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pbx
