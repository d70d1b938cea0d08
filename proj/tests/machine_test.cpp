#include <gtest/gtest.h>

#include "aridem/engine.hpp"
#include "aridem/machine.hpp"
#include "aridem/programs.hpp"

namespace aridem {
namespace {

const CostModel kDefaults{};

SimulationResult sim(const Program& p, std::uint32_t workers, CostModel costs = kDefaults,
                     DispatchPolicy policy = DispatchPolicy::kLowestIdle) {
  return simulate(p, MachineConfig{workers, 0, policy}, costs);
}

TEST(Simulate, SingleWorkerMatchesSequentialCount) {
  for (std::size_t n : {1, 2, 5, 9}) {
    const Program p = build_matmul_program(n, n);
    const RunResult r = run(p);
    for (CostModel c : {kDefaults, CostModel{3, 0, 1}, CostModel{0, 5, 0}}) {
      const SimulationResult s = sim(p, 1, c);
      EXPECT_EQ(s.metrics.elements_processed, r.elements_processed);
      EXPECT_EQ(s.outputs, r.outputs);
    }
  }
}

// Hand trace: b dispatched to worker 0 at t=0, computed by 11, returned at
// 21; a dispatched at 21, returned (completion only) at 42.
TEST(Simulate, NegateDemoOnTwoWorkers) {
  const SimulationResult s = sim(build_negate_demo(), 2);
  EXPECT_EQ(s.metrics.messages, 4u);
  EXPECT_EQ(s.metrics.elements_processed, 2u);
  EXPECT_EQ(s.metrics.sim_time, 42u);
  EXPECT_EQ(s.metrics.per_worker_processed, (std::vector<std::uint64_t>{2, 0}));
  EXPECT_EQ(s.metrics.idle_time_total, (32u - 2u) + 32u);
  EXPECT_EQ(s.outputs, (Outputs{{IndexList{}, -5}}));
}

TEST(Simulate, SpeedupOverWorkerCounts) {
  const Program p = build_matmul_program(32, 1);
  SimTime previous = std::numeric_limits<SimTime>::max();
  for (std::uint32_t workers : {1u, 2u, 4u, 8u, 16u}) {
    const SimTime t = sim(p, workers).metrics.sim_time;
    EXPECT_LT(t, previous) << workers;
    previous = t;
  }
}

TEST(Simulate, WorkIsIndependentOfWorkerCount) {
  for (std::size_t n : {2, 4, 7}) {
    const Program p = build_matmul_program(n, 3);
    const RunResult ref = run(p);
    const SimulationResult one = sim(p, 1);
    for (std::uint32_t workers : {2u, 3u, 8u, 16u}) {
      for (auto policy : {DispatchPolicy::kLowestIdle, DispatchPolicy::kRoundRobin}) {
        const SimulationResult s = sim(p, workers, kDefaults, policy);
        EXPECT_EQ(s.metrics.elements_processed, one.metrics.elements_processed);
        EXPECT_EQ(s.metrics.result_checksum, one.metrics.result_checksum);
        EXPECT_EQ(s.metrics.messages, one.metrics.messages);
        EXPECT_EQ(s.outputs, ref.outputs);
        EXPECT_NO_THROW(validate_metrics(s.metrics));
      }
    }
  }
}

TEST(Simulate, Deterministic) {
  const Program p = build_matmul_program(10, 4);
  for (auto policy : {DispatchPolicy::kLowestIdle, DispatchPolicy::kRoundRobin}) {
    EXPECT_EQ(sim(p, 6, CostModel{2, 7, 1}, policy).metrics, sim(p, 6, CostModel{2, 7, 1}, policy).metrics);
  }
}

TEST(Simulate, MasterCostKeepsResults) {
  const Program p = build_matmul_program(6, 2);
  const SimulationResult fast = sim(p, 4);
  const SimulationResult slow = sim(p, 4, CostModel{1, 10, 3});
  EXPECT_EQ(fast.outputs, slow.outputs);
  EXPECT_GT(slow.metrics.sim_time, fast.metrics.sim_time);
}

// Whenever the master waits, either nothing is ready or nobody is idle.
TEST(Simulate, NoIdleWorkerWhileWorkIsReady) {
  for (std::size_t n : {2, 3, 5}) {
    for (std::uint32_t workers : {1u, 3u, 16u}) {
      for (CostModel c : {kDefaults, CostModel{4, 1, 2}}) {
        const Program p = build_matmul_program(n, 9);
        MachineSimulator simulator(p, MachineConfig{workers}, c);
        std::size_t waits = 0;
        simulator.set_trace([&](const MasterEvent& ev) {
          if (ev.kind != MasterEvent::Kind::kWait) return;
          ++waits;
          EXPECT_TRUE(ev.pending_units == 0 || ev.idle_workers == 0);
        });
        simulator.run();
        EXPECT_GT(waits, 0u);
      }
    }
  }
}

TEST(Simulate, CriticalPathLowerBound) {
  const std::size_t n = 4;
  const SimulationResult s = sim(build_matmul_program(n, 0), 64);
  EXPECT_GE(s.metrics.sim_time, n * kDefaults.t_proc);
  // Replicate, multiply, then n chained sums, each a full round trip.
  EXPECT_GE(s.metrics.sim_time, (n + 2) * (2 * kDefaults.t_msg + kDefaults.t_proc));
}

TEST(Simulate, EventCeiling) {
  MachineConfig m{2};
  m.max_events = 10;
  try {
    simulate(build_matmul_program(3, 0), m, kDefaults);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEventLimit);
  }
}

TEST(Simulate, RejectsBadConfiguration) {
  const Program p = build_negate_demo();
  EXPECT_THROW(simulate(p, MachineConfig{0}, kDefaults), Error);
  EXPECT_THROW(simulate(p, MachineConfig{1}, CostModel{0, 0, 0}), Error);
}

TEST(WorkerBusyProfile, SingleWorkerIsBalanced) {
  EXPECT_DOUBLE_EQ(worker_busy_profile(sim(build_matmul_program(5, 1), 1).metrics), 1.0);
}

TEST(WorkerBusyProfile, MatmulOnFourWorkers) {
  const double ratio = worker_busy_profile(sim(build_matmul_program(16, 0), 4).metrics);
  EXPECT_GE(ratio, 1.0);
  EXPECT_LE(ratio, 1.5);
}

TEST(WorkerBusyProfile, ApproachesOneWithMoreElements) {
  double previous = std::numeric_limits<double>::infinity();
  for (std::uint32_t count : {10u, 100u, 1000u, 10000u}) {
    const double ratio = worker_busy_profile(sim(build_independent_program(count, 1), 7).metrics);
    EXPECT_GE(ratio, 1.0);
    EXPECT_LE(ratio, previous);
    previous = ratio;
  }
  EXPECT_LT(previous, 1.01);
}

TEST(WorkerBusyProfile, ZeroProcessedIsAnError) {
  Metrics m;
  m.per_worker_busy = {0};
  m.per_worker_processed = {0};
  EXPECT_THROW(worker_busy_profile(m), Error);
}

TEST(WorkerBusyProfile, FallsBackToCountsWithoutComputeTime) {
  const SimulationResult s = sim(build_matmul_program(3, 0), 1, CostModel{0, 1, 0});
  EXPECT_DOUBLE_EQ(worker_busy_profile(s.metrics), 1.0);
}

TEST(ValidateMetrics, CatchesInconsistentRecords) {
  Metrics m = sim(build_matmul_program(3, 0), 2).metrics;
  EXPECT_NO_THROW(validate_metrics(m));
  ++m.elements_processed;
  EXPECT_THROW(validate_metrics(m), Error);
  --m.elements_processed;
  m.sim_time = 0;
  EXPECT_THROW(validate_metrics(m), Error);
}

}  // namespace
}  // namespace aridem
