#include "scgan/parallel/kernels.h"

#include <algorithm>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scgan::parallel {

namespace {

std::size_t block_count(std::size_t n) { return (n + kBlockItems - 1) / kBlockItems; }

double run_block(std::size_t b, std::size_t n, const ItemFn& fn, std::span<double> buf) {
  std::fill(buf.begin(), buf.end(), 0.0);
  double loss = 0.0;
  const std::size_t end = std::min(n, (b + 1) * kBlockItems);
  for (std::size_t i = b * kBlockItems; i < end; ++i) loss += fn(i, buf);
  return loss;
}

double reduce_blocks(const std::vector<double>& losses, const std::vector<double>& bufs,
                     std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t width = out.size();
  double loss = 0.0;
  for (std::size_t b = 0; b < losses.size(); ++b) {
    loss += losses[b];
    const double* src = bufs.data() + b * width;
    for (std::size_t k = 0; k < width; ++k) out[k] += src[k];
  }
  return loss;
}

void nearest_for_row(nn::ConstMatrixView points, nn::ConstMatrixView ref, std::size_t n,
                     std::size_t i, std::vector<std::pair<double, std::size_t>>& scratch,
                     std::size_t* dst) {
  scratch.resize(ref.rows);
  const auto p = points.row(i);
  for (std::size_t j = 0; j < ref.rows; ++j) {
    const auto q = ref.row(j);
    double d = 0.0;
    for (std::size_t c = 0; c < points.cols; ++c) {
      const double diff = p[c] - q[c];
      d += diff * diff;
    }
    scratch[j] = {d, j};
  }
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n),
                    scratch.end());
  for (std::size_t k = 0; k < n; ++k) dst[k] = scratch[k].second;
}

}  // namespace

double accumulate_blocks_serial(std::size_t n, const ItemFn& fn, std::span<double> out) {
  const std::size_t blocks = block_count(n);
  const std::size_t width = out.size();
  std::vector<double> losses(blocks);
  std::vector<double> bufs(blocks * width);
  for (std::size_t b = 0; b < blocks; ++b) {
    losses[b] = run_block(b, n, fn, std::span<double>(bufs.data() + b * width, width));
  }
  return reduce_blocks(losses, bufs, out);
}

double accumulate_blocks_omp(std::size_t n, const ItemFn& fn, std::span<double> out) {
  const std::size_t blocks = block_count(n);
  const std::size_t width = out.size();
  std::vector<double> losses(blocks);
  std::vector<double> bufs(blocks * width);
  std::exception_ptr error;
  const long nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(static) if (nb > 1)
  for (long b = 0; b < nb; ++b) {
    try {
      const auto ub = static_cast<std::size_t>(b);
      losses[ub] = run_block(ub, n, fn, std::span<double>(bufs.data() + ub * width, width));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return reduce_blocks(losses, bufs, out);
}

double accumulate_blocks(Exec exec, std::size_t n, const ItemFn& fn, std::span<double> out) {
  return exec == Exec::omp ? accumulate_blocks_omp(n, fn, out)
                           : accumulate_blocks_serial(n, fn, out);
}

void squared_distances_serial(nn::ConstMatrixView a, nn::ConstMatrixView b, nn::MatrixView out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const auto p = a.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const auto q = b.row(j);
      double d = 0.0;
      for (std::size_t c = 0; c < a.cols; ++c) {
        const double diff = p[c] - q[c];
        d += diff * diff;
      }
      out(i, j) = d;
    }
  }
}

void squared_distances_omp(nn::ConstMatrixView a, nn::ConstMatrixView b, nn::MatrixView out) {
  const long rows = static_cast<long>(a.rows);
#pragma omp parallel for schedule(static)
  for (long li = 0; li < rows; ++li) {
    const auto i = static_cast<std::size_t>(li);
    const auto p = a.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const auto q = b.row(j);
      double d = 0.0;
      for (std::size_t c = 0; c < a.cols; ++c) {
        const double diff = p[c] - q[c];
        d += diff * diff;
      }
      out(i, j) = d;
    }
  }
}

std::vector<std::size_t> nearest_rows_serial(nn::ConstMatrixView points, nn::ConstMatrixView ref,
                                             std::size_t n) {
  std::vector<std::size_t> result(points.rows * n);
  std::vector<std::pair<double, std::size_t>> scratch;
  for (std::size_t i = 0; i < points.rows; ++i) {
    nearest_for_row(points, ref, n, i, scratch, result.data() + i * n);
  }
  return result;
}

std::vector<std::size_t> nearest_rows_omp(nn::ConstMatrixView points, nn::ConstMatrixView ref,
                                          std::size_t n) {
  std::vector<std::size_t> result(points.rows * n);
  const long rows = static_cast<long>(points.rows);
#pragma omp parallel
  {
    std::vector<std::pair<double, std::size_t>> scratch;
#pragma omp for schedule(static)
    for (long li = 0; li < rows; ++li) {
      const auto i = static_cast<std::size_t>(li);
      nearest_for_row(points, ref, n, i, scratch, result.data() + i * n);
    }
  }
  return result;
}

std::vector<std::size_t> nearest_rows(Exec exec, nn::ConstMatrixView points,
                                      nn::ConstMatrixView ref, std::size_t n) {
  return exec == Exec::omp ? nearest_rows_omp(points, ref, n)
                           : nearest_rows_serial(points, ref, n);
}

void for_each_index(Exec exec, std::size_t n, const std::function<void(std::size_t)>& f) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < ln; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

void for_each_index_jobs(std::size_t jobs, std::size_t n,
                         const std::function<void(std::size_t)>& f) {
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(jobs))
  for (long i = 0; i < ln; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace scgan::parallel
