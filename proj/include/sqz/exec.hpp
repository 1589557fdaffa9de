#pragma once

namespace sqz {

/// Execution policy for the data-parallel kernels.  `parallel` runs the
/// OpenMP path when compiled with OpenMP support and falls back to the
/// serial path otherwise.  Both policies produce identical results
/// run-for-run; the serial variants are kept as reference implementations
/// for the consistency tests and the benchmark tool.
enum class Exec { serial, parallel };

}  // namespace sqz
