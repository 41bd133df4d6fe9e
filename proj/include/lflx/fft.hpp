#pragma once

#include "lflx/field.hpp"
#include "lflx/grid.hpp"

namespace lflx {

/// Unnormalized c2c DFT, sign -1 (forward) or +1 (backward), out-of-place.
/// Plans are cached per (dim, n, sign) and safe for concurrent execution.
void fft_execute(const Grid& grid, const cplx* in, cplx* out, int sign);

}  // namespace lflx
