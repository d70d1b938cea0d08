// aridem: run element-model and instruction-model experiments.
//
//   aridem demo negate|square
//   aridem run element|instruction --n 8 --procs 4 --seed 1
//   aridem sweep --sizes 40,60 --procs 2,4,8,16 --format json --out sweep.json
//   aridem counts --sizes 40,60,80,100
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "aridem/report.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct CostFlags {
  aridem::CostModel costs;
  aridem::DispatchPolicy dispatch = aridem::DispatchPolicy::kLowestIdle;
  aridem::Format format = aridem::Format::kCsv;
  std::string out;
};

void add_common(CLI::App* cmd, CostFlags& f) {
  cmd->add_option("--t-proc", f.costs.t_proc, "time units per operation at a worker");
  cmd->add_option("--t-msg", f.costs.t_msg, "time units per master<->worker message");
  cmd->add_option("--t-master", f.costs.t_master, "master time per dispatch");
  cmd->add_option("--dispatch", f.dispatch, "worker selection: idle|roundrobin")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, aridem::DispatchPolicy>{{"idle", aridem::DispatchPolicy::kLowestIdle},
                                                        {"roundrobin", aridem::DispatchPolicy::kRoundRobin}}));
  cmd->add_option("--format", f.format, "csv|json")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, aridem::Format>{{"csv", aridem::Format::kCsv}, {"json", aridem::Format::kJson}}));
  cmd->add_option("--out", f.out, "output file (default: standard output)");
}

// Writes via `emit` to the --out file or stdout.
template <typename Fn>
int with_output(const std::string& path, Fn&& emit) {
  if (path.empty()) {
    emit(std::cout);
    std::cout.flush();
    return 0;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    std::cerr << "aridem: cannot open " << path << " for writing\n";
    return kRuntimeFailure;
  }
  emit(file);
  return file ? 0 : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AriDeM element-model simulator and matrix multiplication benchmark"};
  app.require_subcommand(1);

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "print the deduction trace of a demo program");
  demo->add_option("name", demo_name, "negate|square")->required();

  CostFlags run_flags;
  std::string run_model;
  aridem::RunSpec run_spec;
  auto* run = app.add_subcommand("run", "run one experiment and emit one metrics record");
  run->add_option("model", run_model, "element|instruction")
      ->required()
      ->check(CLI::IsMember({"element", "instruction"}));
  run->add_option("--n", run_spec.n, "matrix side")->check(CLI::PositiveNumber);
  run->add_option("--procs", run_spec.procs, "worker count")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_spec.seed, "matrix seed");
  add_common(run, run_flags);

  CostFlags sweep_flags;
  aridem::SweepSpec sweep_spec;
  auto* sweep = app.add_subcommand("sweep", "run both models over sizes x processor counts");
  sweep->add_option("--sizes", sweep_spec.sizes, "matrix sides")->delimiter(',')->check(CLI::PositiveNumber);
  sweep->add_option("--procs", sweep_spec.procs, "worker counts")->delimiter(',')->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_spec.seed, "matrix seed");
  sweep->add_option("--max-size", sweep_spec.max_size, "largest accepted matrix side");
  sweep->add_option("--threads", sweep_spec.threads, "parallel cells (0: all cores)");
  add_common(sweep, sweep_flags);

  CostFlags count_flags;
  std::vector<std::uint64_t> count_sizes{40, 60, 80, 100};
  auto* counts = app.add_subcommand("counts", "instruction and element count table");
  counts->add_option("--sizes", count_sizes, "matrix sides")->delimiter(',')->check(CLI::PositiveNumber);
  counts->add_option("--format", count_flags.format, "csv|json")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, aridem::Format>{{"csv", aridem::Format::kCsv}, {"json", aridem::Format::kJson}}));
  counts->add_option("--out", count_flags.out, "output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*demo) {
      if (!aridem::write_demo(std::cout, demo_name)) {
        std::cerr << "aridem: unknown demo '" << demo_name << "' (expected negate or square)\n";
        return kUsageError;
      }
      return 0;
    }

    if (*run) {
      run_spec.model = run_model == "element" ? aridem::Model::kElement : aridem::Model::kInstruction;
      run_spec.costs = run_flags.costs;
      run_spec.dispatch = run_flags.dispatch;
      try {
        run_spec.costs.validate();
      } catch (const aridem::Error& e) {
        std::cerr << "aridem: " << e.what() << '\n';
        return kUsageError;
      }
      const aridem::Record rec = aridem::run_record(run_spec);
      return with_output(run_flags.out,
                         [&](std::ostream& os) { aridem::write_records(os, {rec}, run_flags.format); });
    }

    if (*sweep) {
      sweep_spec.costs = sweep_flags.costs;
      sweep_spec.dispatch = sweep_flags.dispatch;
      try {
        sweep_spec.validate();
      } catch (const aridem::Error& e) {
        std::cerr << "aridem: " << e.what() << '\n';
        return kUsageError;
      }
      const aridem::SweepResult result = aridem::run_sweep(sweep_spec);
      // With --out the summary goes to stdout, otherwise to stderr so that
      // stdout stays a single parseable CSV.
      std::ostream& summary = sweep_flags.out.empty() ? std::cerr : std::cout;
      return with_output(sweep_flags.out, [&](std::ostream& os) {
        aridem::write_sweep(os, summary, result, sweep_flags.format);
      });
    }

    if (*counts) {
      const auto rows = aridem::count_table(count_sizes);
      const int rc = with_output(count_flags.out,
                                 [&](std::ostream& os) { aridem::write_counts(os, rows, count_flags.format); });
      if (!aridem::counts_match_reference(rows)) {
        std::cerr << "aridem: reference counts disagree with the published table\n";
        return kRuntimeFailure;
      }
      return rc;
    }
  } catch (const std::exception& e) {
    std::cerr << "aridem: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}
