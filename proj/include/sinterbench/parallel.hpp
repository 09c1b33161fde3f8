#pragma once

namespace sinterbench {

/// Worker count for parallel kernels: SINTERBENCH_THREADS when set to a
/// positive integer, otherwise the OpenMP default (1 without OpenMP).
int worker_count();

/// Resolves a requested count; values <= 0 mean worker_count().
inline int resolve_workers(int requested) { return requested > 0 ? requested : worker_count(); }

}  // namespace sinterbench
