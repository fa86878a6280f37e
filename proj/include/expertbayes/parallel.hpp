#pragma once

#include <cstddef>
#include <functional>

namespace expertbayes {

// Worker count for a request: 0 means hardware concurrency. The
// EXPERTBAYES_THREADS environment variable, when set to a positive value,
// caps the result.
unsigned resolve_workers(unsigned requested);

// Runs body(i) for i in [0, count) on up to `workers` threads. Indices are
// claimed dynamically; the first exception thrown is rethrown after all
// workers stop.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace expertbayes
