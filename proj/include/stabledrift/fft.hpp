#pragma once

#include "stabledrift/grid.hpp"

namespace sd::fft {

/// In-place unnormalised forward transform (sign -1).
void forward(Field& f, bool threaded = true);
/// In-place backward transform divided by N^dim.
void backward(Field& f, bool threaded = true);

void forward(cplx* data, const TorusGrid& g, bool threaded = true);
void backward(cplx* data, const TorusGrid& g, bool threaded = true);

}  // namespace sd::fft
