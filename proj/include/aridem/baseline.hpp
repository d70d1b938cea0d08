#pragma once

// Instruction-model baseline: the textbook product, the loop instruction
// count S = i*n^3 + j*n^2, the reference element count, and a simulated
// broadcast/scatter/gather run on P slaves.

#include <array>
#include <cstdint>
#include <numeric>

#include "aridem/machine.hpp"
#include "aridem/programs.hpp"

namespace aridem {

inline Matrix matmul_oracle(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::kInvalidArgument, "matrix sides differ");
  const std::size_t n = a.n();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Scalar acc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        acc = detail::checked_add(acc, detail::checked_mul(a(i, k), b(k, j)));
      }
      c(i, j) = acc;
    }
  }
  return c;
}

struct CountModel {
  std::uint64_t i = 0;  // per innermost-loop iteration (runs n^3 times)
  std::uint64_t j = 0;  // per outer-loop pair iteration (runs n^2 times)
};

// Both fits are exact on every column of the published count table.
inline constexpr CountModel kInstructionCounts{40, 107};
inline constexpr CountModel kReferenceElementCounts{14, 10};

inline std::uint64_t instruction_count(const CountModel& model, std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "n must be >= 1");
  std::uint64_t sq, cube, cubic, quadratic, total;
  if (__builtin_mul_overflow(n, n, &sq) || __builtin_mul_overflow(sq, n, &cube) ||
      __builtin_mul_overflow(model.i, cube, &cubic) || __builtin_mul_overflow(model.j, sq, &quadratic) ||
      __builtin_add_overflow(cubic, quadratic, &total)) {
    throw Error(ErrorKind::kOverflow, "count for n = " + std::to_string(n) + " exceeds 64 bits");
  }
  return total;
}

inline std::uint64_t element_count_reference(std::uint64_t n) {
  return instruction_count(kReferenceElementCounts, n);
}

// Elements created by this project's matmul encoding.
inline std::uint64_t encoding_element_count(std::uint64_t n) {
  return instruction_count(CountModel{4, 3}, n);
}

struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  // Exact comparison against p/q.
  bool at_least(std::uint64_t p, std::uint64_t q) const {
    return static_cast<unsigned __int128>(num) * q >= static_cast<unsigned __int128>(p) * den;
  }
  bool at_most(std::uint64_t p, std::uint64_t q) const {
    return static_cast<unsigned __int128>(num) * q <= static_cast<unsigned __int128>(p) * den;
  }

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

inline Ratio make_ratio(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

// Instructions per reference element.
inline Ratio ratio_report(std::uint64_t n) {
  return make_ratio(instruction_count(kInstructionCounts, n), element_count_reference(n));
}

// Published measurements, verbatim.
struct ReferenceTables {
  static constexpr std::array<std::uint64_t, 4> kSizes{40, 60, 80, 100};
  static constexpr std::array<std::uint32_t, 4> kProcs{2, 4, 8, 16};

  static constexpr std::array<std::uint64_t, 4> kTable5Elements{912000, 3060000, 7232000, 14100000};
  static constexpr std::array<std::uint64_t, 4> kTable5Instructions{2731200, 9025200, 21164800,
                                                                    41070000};

  // Milliseconds, rows by size, columns by processor count.
  static constexpr std::array<std::array<double, 4>, 4> kElementModelMs{{
      {88.733, 70.086, 324.738, 25.423},
      {826.578, 315.925, 607.044, 292.929},
      {1280.438, 379.082, 209.524, 255.179},
      {5515.629, 3591.148, 1461.293, 1095.009},
  }};
  static constexpr std::array<std::array<double, 4>, 4> kInstructionModelMs{{
      {4.72, 2.56, 3.409, 3.2113},
      {10.058, 6.466, 10.8121, 7.774},
      {20.794, 9.016, 14.717, 16.559},
      {73.357, 15.62, 21.03, 24.272},
  }};
};

// Row share of slave s: contiguous blocks of ceil(n/P) rows; the last
// non-empty block takes what remains, later slaves get nothing.
inline std::pair<std::size_t, std::size_t> row_block(std::size_t n, std::uint32_t procs,
                                                     std::uint32_t slave) {
  const std::size_t chunk = (n + procs - 1) / procs;
  const std::size_t begin = std::min(n, slave * chunk);
  const std::size_t end = std::min(n, begin + chunk);
  return {begin, end};
}

// A is sent whole to every slave, B's blocks are scattered, each slave
// returns its block of C: three messages per slave. The master sends
// sequentially at t_master per message.
inline SimulationResult simulate_instruction_model(std::size_t n, std::uint32_t procs,
                                                   const CostModel& costs, std::uint64_t seed) {
  if (n == 0 || procs == 0) throw Error(ErrorKind::kInvalidArgument, "need n >= 1 and P >= 1");
  costs.validate();

  const Matrix a = generate_matrix(n, seed, 0);
  const Matrix b = generate_matrix(n, seed, 1);
  const Matrix c = matmul_oracle(a, b);

  SimulationResult out;
  Metrics& m = out.metrics;
  m.per_worker_processed.assign(procs, 0);
  m.per_worker_busy.assign(procs, 0);
  m.messages = 3ULL * procs;

  SimTime last_completion = 0;
  for (std::uint32_t s = 0; s < procs; ++s) {
    const auto [begin, end] = row_block(n, procs, s);
    const std::uint64_t rows = end - begin;
    const std::uint64_t work =
        kInstructionCounts.i * rows * n * n + kInstructionCounts.j * rows * n;
    m.per_worker_processed[s] = work;
    m.per_worker_busy[s] = work * costs.t_proc;
    m.elements_processed += work;

    const SimTime ready = costs.t_master * (2ULL * s + 2) + costs.t_msg;
    const SimTime done = ready + m.per_worker_busy[s];
    last_completion = std::max(last_completion, done);
    m.sim_time = std::max(m.sim_time, done + costs.t_msg);

    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out.outputs.emplace(IndexList{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)},
                            c(i, j));
      }
    }
  }
  for (std::uint32_t s = 0; s < procs; ++s) m.idle_time_total += last_completion - m.per_worker_busy[s];
  m.result_checksum = checksum(out.outputs);
  return out;
}

}  // namespace aridem
