#pragma once

#include <vector>

namespace poromfe {

/// Serial is the reference path; Parallel runs the per-cell kernel under
/// OpenMP. Both scatter into global storage serially in cell order, so the
/// two produce bit-identical results.
enum class ExecPolicy { Serial, Parallel };

/// Evaluates kernel(cell, out) for every cell, where out points at
/// `stride` doubles reserved for that cell.
template <class Kernel>
std::vector<double> compute_cells(ExecPolicy policy, int num_cells, int stride, Kernel&& kernel) {
    std::vector<double> out(static_cast<std::size_t>(num_cells) * stride, 0.0);
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < num_cells; ++c) kernel(c, out.data() + static_cast<std::size_t>(c) * stride);
    } else {
        for (int c = 0; c < num_cells; ++c) kernel(c, out.data() + static_cast<std::size_t>(c) * stride);
    }
    return out;
}

int max_threads();

}  // namespace poromfe
