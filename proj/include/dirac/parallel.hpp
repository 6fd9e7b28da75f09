#pragma once

#include <cstddef>
#include <functional>

namespace dirac {

/// Worker count used by the scans; 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; results
/// must be written to disjoint slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dirac
