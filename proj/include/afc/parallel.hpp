#pragma once

#include <cstddef>
#include <functional>

namespace afc {

/// Worker count used by parallel_for. Defaults to 1.
void set_num_threads(int n);
int num_threads();

/// Run body(i) for i in [0, n) across the configured workers.
///
/// Each index is handled by exactly one worker and bodies are expected to
/// write only to slots owned by their index, so results are independent of
/// the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace afc
