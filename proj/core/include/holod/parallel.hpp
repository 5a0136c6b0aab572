#pragma once

#include <functional>

namespace holod {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must
/// write to disjoint output slots; the schedule is nondeterministic but the
/// merged output is then identical to a serial run.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Number of hardware threads, at least 1.
int default_thread_count();

}  // namespace holod
