#include <gtest/gtest.h>

#include "aridem/baseline.hpp"
#include "aridem/engine.hpp"
#include "aridem/programs.hpp"
#include "oracles.hpp"

namespace aridem {
namespace {

std::uint64_t closed_form(std::uint64_t n) { return 4 * n * n * n + 3 * n * n; }

TEST(Step, NegateDemoFirstStep) {
  const Program p = build_negate_demo();
  std::vector<std::string> created;
  RunOptions opts;
  opts.trace = [&](const TraceEvent& ev) {
    if (ev.kind == TraceEvent::Kind::kCreate) created.push_back(p.describe(*ev.element));
  };
  DeductionEngine engine(p, opts);
  EXPECT_EQ(engine.step(), StepStatus::kProgressed);
  EXPECT_EQ(engine.result().elements_processed, 1u);
  EXPECT_EQ(engine.queue_depth(), 1u);
  EXPECT_EQ(created, std::vector<std::string>{"a = -5"});
}

TEST(Step, EmptyQueueIsQuiescent) {
  ProgramBuilder pb;
  pb.result(pb.declare("x", 0));
  const Program p = std::move(pb).build();
  DeductionEngine engine(p);
  EXPECT_EQ(engine.step(), StepStatus::kQuiescent);
  EXPECT_EQ(engine.step(), StepStatus::kQuiescent);
  EXPECT_EQ(engine.result().elements_processed, 0u);
  EXPECT_EQ(engine.result().elements_created, 0u);
}

TEST(Step, MatmulOfOneTakesSevenSteps) {
  const Program p = build_matmul_program(Matrix(1, {3}), Matrix(1, {4}));
  DeductionEngine engine(p);
  int steps = 0;
  while (engine.step() == StepStatus::kProgressed) ++steps;
  EXPECT_EQ(steps, 7);
  EXPECT_EQ(engine.result().outputs, (Outputs{{IndexList{0, 0}, 12}}));
  EXPECT_EQ(engine.result().elements_created, 7u);
}

TEST(Run, NegateDemo) {
  const RunResult r = run(build_negate_demo());
  EXPECT_EQ(r.outputs, (Outputs{{IndexList{}, -5}}));
  EXPECT_EQ(r.elements_processed, 2u);
  EXPECT_EQ(r.max_partial_depth, 0u);
}

TEST(Run, SquareDemo) {
  RunResult r = run(build_square_demo());
  EXPECT_EQ(r.outputs, (Outputs{{IndexList{}, 25}}));
  EXPECT_EQ(r.elements_processed, 2u);
  EXPECT_EQ(run(build_square_demo(0)).outputs, (Outputs{{IndexList{}, 0}}));
  EXPECT_EQ(run(build_square_demo(-3)).outputs, (Outputs{{IndexList{}, 9}}));
}

TEST(Run, MatmulTwoByTwo) {
  const Matrix a(2, {1, 2, 3, 4});
  const Matrix b(2, {5, 6, 7, 8});
  const RunResult r = run(build_matmul_program(a, b));
  EXPECT_EQ(outputs_to_matrix(r.outputs, 2), Matrix(2, {19, 22, 43, 50}));
  EXPECT_EQ(r.elements_processed, 44u);
  EXPECT_EQ(r.elements_created, 44u);
}

TEST(Run, MatchesOracleAndClosedForm) {
  for (std::size_t n = 1; n <= 9; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Matrix a = generate_matrix(n, seed, 0);
      const Matrix b = generate_matrix(n, seed, 1);
      const RunResult r = run(build_matmul_program(a, b));
      EXPECT_EQ(outputs_to_matrix(r.outputs, n).entries(),
                testing::dot_product_matmul(n, a.entries(), b.entries()));
      EXPECT_EQ(r.elements_created, closed_form(n));
      EXPECT_EQ(r.elements_processed, r.elements_created);
    }
  }
}

// Sum seeds wait for their first product while one operand of each pending
// multiply waits for its partner, so the store peaks above n^3.
TEST(Run, PartialDepthBound) {
  EXPECT_EQ(run(build_matmul_program(1, 0)).max_partial_depth, 2u);
  for (std::size_t n = 1; n <= 32; n += (n < 8 ? 1 : 8)) {
    const RunResult r = run(build_matmul_program(n, n));
    EXPECT_LE(r.max_partial_depth, n * n * n + n * n) << n;
  }
}

TEST(Run, IdentityTimesBIsB) {
  const Matrix b = generate_matrix(8, 5, 1);
  const RunResult r = run(build_matmul_program(Matrix::identity(8), b));
  EXPECT_EQ(outputs_to_matrix(r.outputs, 8), b);
}

// LIFO changes the schedule but not outputs or counts.
TEST(Run, QueueDisciplineDoesNotChangeResults) {
  for (std::size_t n : {1, 2, 3, 5, 8}) {
    const Program p = build_matmul_program(n, 17 * n);
    const RunResult fifo = run(p, {QueueDiscipline::kFifo, {}});
    const RunResult lifo = run(p, {QueueDiscipline::kLifo, {}});
    EXPECT_EQ(fifo.outputs, lifo.outputs);
    EXPECT_EQ(fifo.elements_processed, lifo.elements_processed);
    EXPECT_EQ(fifo.elements_created, lifo.elements_created);
  }
}

TEST(Run, UnmatchedJoinDeadlocks) {
  ProgramBuilder pb;
  const auto x = pb.declare("x", 1);
  const auto y = pb.declare("y", 1);
  const auto z = pb.declare("z", 1);
  pb.mul_pair(x, y, z);
  pb.sink(z);
  pb.result(z);
  pb.element(x, {0}, 2);
  pb.element(x, {1}, 2);
  pb.element(y, {0}, 3);
  const Program p = std::move(pb).build();
  try {
    run(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDeadlockedJoin);
  }
}

Program two_into_one() {
  ProgramBuilder pb;
  const auto x = pb.declare("x", 1);
  const auto y = pb.declare("y", 0);
  pb.unary(x, Operation::kNegate, y, IndexTransform::drop(0));
  pb.sink(y);
  pb.result(y);
  pb.element(x, {0}, 1);
  pb.element(x, {1}, 2);
  return std::move(pb).build();
}

TEST(Run, DuplicateLiveElementIsRejected) {
  try {
    run(two_into_one());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDuplicateElement);
  }
}

TEST(Run, DuplicateResultIsRejected) {
  try {
    run(two_into_one(), {QueueDiscipline::kLifo, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDuplicateResult);
  }
}

TEST(Run, OverflowHaltsTheRun) {
  try {
    run(build_square_demo(Scalar{1} << 40));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOverflow);
  }
}

TEST(Run, ElementWithoutRelationsIsDiscarded) {
  ProgramBuilder pb;
  const auto x = pb.declare("x", 0);
  pb.result(x);
  pb.element(x, {}, 4);
  const RunResult r = run(std::move(pb).build());
  EXPECT_EQ(r.elements_processed, 1u);
  EXPECT_TRUE(r.outputs.empty());
}

TEST(ValidateProgram, RejectsBadPrograms) {
  {
    ProgramBuilder pb;
    const auto x = pb.declare("x", 1);
    const auto y = pb.declare("y", 2);
    pb.unary(x, Operation::kNegate, y);  // keep: arity 1 -> 2
    pb.result(y);
    EXPECT_THROW(std::move(pb).build(), Error);
  }
  {
    ProgramBuilder pb;
    const auto x = pb.declare("x", 1);
    pb.unary(x, Operation::kNegate, Identifier{42});
    pb.result(x);
    EXPECT_THROW(std::move(pb).build(), Error);
  }
  {
    ProgramBuilder pb;
    const auto x = pb.declare("x", 1);
    pb.result(x);
    pb.element(x, {0, 1}, 3);
    EXPECT_THROW(std::move(pb).build(), Error);
  }
  {
    ProgramBuilder pb;
    const auto x = pb.declare("x", 0);
    const auto y = pb.declare("y", 0);
    const auto z = pb.declare("z", 0);
    pb.mul_pair(x, y, z);
    pb.unary(x, Operation::kNegate, z);  // join input with a second consumer
    pb.result(z);
    EXPECT_THROW(std::move(pb).build(), Error);
  }
  {
    ProgramBuilder pb;
    const auto x = pb.declare("x", 0);
    pb.result(x);
    pb.element(x, {}, 0);
    Program p = std::move(pb).build();
    p.initial_elements[0].value = Value(1, 2);
    EXPECT_THROW(validate_program(p), Error);
  }
}

}  // namespace
}  // namespace aridem
