#pragma once

namespace wsturm {

/// Worker count for element loops (assembly, quadrature sweeps). Results
/// are bit-identical for any count: per-element work is independent and
/// reductions always run in element order. Default 1. Set once up front;
/// not synchronized against concurrent solver calls.
void set_thread_count(int threads);
int thread_count();

} // namespace wsturm
