#pragma once

namespace lingbase::parallel {

/// Worker count for OpenMP kernels: the runtime default, capped by the
/// LINGBASE_THREADS environment variable when set. Always >= 1.
int worker_count();

}  // namespace lingbase::parallel
