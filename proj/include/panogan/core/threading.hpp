#pragma once

namespace panogan {

// Process-wide worker count for the parallel kernels. 1 selects the serial
// path inside each kernel. Kernels are written so results are bitwise
// identical for every thread count: threads only split independent output
// elements, never a single accumulation.
void set_num_threads(int n);
int num_threads();

}  // namespace panogan
