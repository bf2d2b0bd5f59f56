#pragma once

#include <cstddef>
#include <functional>

namespace fmcwsim {

/// Caps the number of worker threads used by parallel_for. 0 restores the
/// hardware default.
void set_max_threads(unsigned count);
unsigned max_threads();

/// Runs body(i) for i in [0, count). Work is split into contiguous static
/// chunks; results must not depend on which thread runs which index. Nested
/// calls from inside a worker run serially. The exception of the lowest
/// failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fmcwsim
