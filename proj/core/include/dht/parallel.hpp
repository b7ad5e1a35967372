#pragma once

#include <functional>

namespace dht {

/// Number of workers to use when the config leaves it at 0.
int default_threads();

/// Run fn(0..n-1) on up to `threads` workers. Each index writes only its own
/// slot in caller-owned storage, so results are independent of scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

} // namespace dht
