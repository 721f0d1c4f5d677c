#pragma once

#include <cstddef>
#include <functional>

namespace commform {

/// Worker count from COMMFORM_WORKERS, else the hardware concurrency (min 1).
std::size_t default_workers();

/// Calls body(i) for every i < count on up to `workers` threads. Indices are
/// handed out dynamically; the first exception thrown is rethrown after all
/// workers stop.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

} // namespace commform
