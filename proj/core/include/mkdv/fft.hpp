#pragma once

#include "mkdv/grid.hpp"

#include <span>

namespace mkdv::fft {

// Unnormalized complex DFTs of arbitrary length:
//   forward:  X_k = sum_j x_j e^{-2 pi i jk/n}
//   backward: x_j = sum_k X_k e^{+2 pi i jk/n}
// Plans are created once per (length, direction) and shared; execution is
// safe from multiple threads. in and out may alias.
void forward(std::span<const cplx> in, std::span<cplx> out);
void backward(std::span<const cplx> in, std::span<cplx> out);

} // namespace mkdv::fft
