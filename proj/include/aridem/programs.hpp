#pragma once

// Program builders: the two single-relation demos, the matrix
// multiplication encoding, and a flat program of independent elements used
// for load-balance checks.

#include <cstdint>
#include <vector>

#include "aridem/program.hpp"

namespace aridem {

class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), entries_(n * n, 0) {
    if (n == 0) throw Error(ErrorKind::kInvalidArgument, "matrix side must be >= 1");
  }
  Matrix(std::size_t n, std::vector<Scalar> row_major) : n_(n), entries_(std::move(row_major)) {
    if (n == 0 || entries_.size() != n * n) {
      throw Error(ErrorKind::kInvalidArgument, "matrix needs n >= 1 and n*n entries");
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t n() const noexcept { return n_; }
  Scalar& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  Scalar operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  const std::vector<Scalar>& entries() const noexcept { return entries_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Scalar> entries_;
};

// 64-bit LCG (Knuth MMIX constants); fixed so matrices are bit-exact everywhere.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }

  // One matrix entry in [0, 9].
  Scalar next_digit() { return static_cast<Scalar>((next() >> 33) % 10); }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kStreamMix = 0x9E3779B97F4A7C15ULL;

// stream_tag 0 for A, 1 for B.
inline Matrix generate_matrix(std::size_t n, std::uint64_t seed, std::uint64_t stream_tag) {
  Matrix m(n);
  Lcg64 rng(seed ^ (stream_tag * kStreamMix));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.next_digit();
  }
  return m;
}

inline Program build_negate_demo(Scalar b = 5) {
  ProgramBuilder pb;
  const auto in = pb.declare("b", 0);
  const auto out = pb.declare("a", 0);
  pb.unary(in, Operation::kNegate, out);
  pb.sink(out);
  pb.element(in, {}, b);
  pb.result(out);
  return std::move(pb).build();
}

inline Program build_square_demo(Scalar length = 5) {
  ProgramBuilder pb;
  const auto in = pb.declare("length", 0);
  const auto out = pb.declare("square_area", 0);
  pb.unary(in, Operation::kSquare, out);
  pb.sink(out);
  pb.element(in, {}, length);
  pb.result(out);
  return std::move(pb).build();
}

// Identifiers of the matrix multiplication encoding, in declaration order.
struct MatmulIds {
  static constexpr Identifier kA{0}, kB{1}, kARep{2}, kBRep{3}, kProduct{4}, kSum{5}, kC{6};
};

// C = A·B as elements:
//   A(i,k) = a_ik, B(j,k) = b_kj (B stored by (column, row)), S(i,j,0) = 0
//   A(i,k)   --replicate n, insert j at 1-->  A'(i,j,k)
//   B(j,k)   --replicate n, insert i at 0-->  B'(i,j,k)
//   A' x B'  --mulpair-->                     P(i,j,k)
//   S x P    --sumstep(n)-->                  S(i,j,k+1), or C(i,j) once k+1 = n
//   C        --sink
// Elements created: 3n^2 initial + 2n^3 replicas + n^3 products + n^3 sums.
inline Program build_matmul_program(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n() || a.n() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "matmul needs two non-empty matrices of equal side");
  }
  const auto n = static_cast<std::uint32_t>(a.n());

  ProgramBuilder pb;
  const auto A = pb.declare("A", 2);
  const auto B = pb.declare("B", 2);
  const auto Ar = pb.declare("A'", 3);
  const auto Br = pb.declare("B'", 3);
  const auto P = pb.declare("P", 3);
  const auto S = pb.declare("S", 3);
  const auto C = pb.declare("C", 2);

  pb.replicate(A, Ar, 1, n);
  pb.replicate(B, Br, 0, n);
  pb.mul_pair(Ar, Br, P);
  pb.sum_step(S, P, S, n, C, 2);
  pb.sink(C);
  pb.result(C);

  pb.reserve_elements(3 * std::size_t{n} * n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t k = 0; k < n; ++k) pb.element(A, {i, k}, a(i, k));
  for (std::uint32_t j = 0; j < n; ++j)
    for (std::uint32_t k = 0; k < n; ++k) pb.element(B, {j, k}, b(k, j));
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) pb.element(S, {i, j, 0}, 0);

  return std::move(pb).build();
}

inline Program build_matmul_program(std::size_t n, std::uint64_t seed) {
  return build_matmul_program(generate_matrix(n, seed, 0), generate_matrix(n, seed, 1));
}

inline Matrix outputs_to_matrix(const Outputs& outputs, std::size_t n) {
  Matrix c(n);
  if (outputs.size() != n * n) {
    throw Error(ErrorKind::kInvalidArgument, "output count does not fill an n x n matrix");
  }
  for (const auto& [idx, v] : outputs) c(idx.at(0), idx.at(1)) = v;
  return c;
}

// `count` independent X(i) --negate--> Y(i) --sink chains.
inline Program build_independent_program(std::uint32_t count, std::uint64_t seed) {
  ProgramBuilder pb;
  const auto x = pb.declare("X", 1);
  const auto y = pb.declare("Y", 1);
  pb.unary(x, Operation::kNegate, y);
  pb.sink(y);
  pb.result(y);
  Lcg64 rng(seed);
  pb.reserve_elements(count);
  for (std::uint32_t i = 0; i < count; ++i) pb.element(x, {i}, rng.next_digit());
  return std::move(pb).build();
}

}  // namespace aridem
