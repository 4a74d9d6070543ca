#pragma once

#include <functional>

namespace curvi {

// Worker count used by parallelFor. 0 selects std::thread::hardware_concurrency.
void setThreadCount(unsigned count);
unsigned threadCount();

// Calls body(i) for every i in [begin, end), split into contiguous chunks
// across worker threads. Iterations must be independent.
void parallelFor(int begin, int end, const std::function<void(int)>& body);

}  // namespace curvi
