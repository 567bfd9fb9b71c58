#pragma once

// Data-parallel kernels. Every kernel exists twice: a plain serial loop kept
// as the reference, and an OpenMP version that must produce bit-identical
// output regardless of thread count. Reductions are done over fixed item
// blocks and summed in block order so the floating-point order never depends
// on scheduling.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "scgan/nn/tensor.h"

namespace scgan::parallel {

enum class Exec { serial, omp };

/// Items per reduction block. Fixed, so sums do not depend on thread count.
inline constexpr std::size_t kBlockItems = 16;

/// Adds one item's contribution into `grad` and returns its scalar loss.
using ItemFn = std::function<double(std::size_t item, std::span<double> grad)>;

/// Sum over items [0, n) of fn's scalar and of its accumulated vector. `out`
/// is overwritten.
double accumulate_blocks_serial(std::size_t n, const ItemFn& fn, std::span<double> out);
double accumulate_blocks_omp(std::size_t n, const ItemFn& fn, std::span<double> out);
double accumulate_blocks(Exec exec, std::size_t n, const ItemFn& fn, std::span<double> out);

/// out(i, j) = |a_i - b_j|^2.
void squared_distances_serial(nn::ConstMatrixView a, nn::ConstMatrixView b, nn::MatrixView out);
void squared_distances_omp(nn::ConstMatrixView a, nn::ConstMatrixView b, nn::MatrixView out);

/// Indices of the `n` nearest rows of `ref` for each row of `points`,
/// ordered by distance; equal distances resolve to the lower index.
/// Result is row-major points.rows x n.
std::vector<std::size_t> nearest_rows_serial(nn::ConstMatrixView points, nn::ConstMatrixView ref,
                                             std::size_t n);
std::vector<std::size_t> nearest_rows_omp(nn::ConstMatrixView points, nn::ConstMatrixView ref,
                                          std::size_t n);
std::vector<std::size_t> nearest_rows(Exec exec, nn::ConstMatrixView points,
                                      nn::ConstMatrixView ref, std::size_t n);

/// Calls f(i) for i in [0, n). f must only write state owned by index i.
void for_each_index(Exec exec, std::size_t n, const std::function<void(std::size_t)>& f);

/// Calls f(i) for i in [0, n) with at most `jobs` threads.
void for_each_index_jobs(std::size_t jobs, std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace scgan::parallel
