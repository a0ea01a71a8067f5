#pragma once

namespace profcat {

// Selects between the OpenMP kernels and the serial reference loops.
// Both produce bit-identical results; the serial path exists for testing
// and benchmarking.
enum class Execution { serial, parallel };

} // namespace profcat
