#pragma once

// Experiment records, sweeps, count tables and their CSV/JSON renderings.
// Everything here writes to caller-supplied streams so that the command line
// tool stays a thin argument parser.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "aridem/baseline.hpp"
#include "aridem/engine.hpp"
#include "aridem/machine.hpp"
#include "aridem/programs.hpp"

namespace aridem {

enum class Model { kElement, kInstruction };
enum class Format { kCsv, kJson };

inline std::string_view to_string(Model m) { return m == Model::kElement ? "element" : "instruction"; }

struct RunSpec {
  Model model = Model::kElement;
  std::size_t n = 1;
  std::uint32_t procs = 1;
  std::uint64_t seed = 0;
  CostModel costs;
  DispatchPolicy dispatch = DispatchPolicy::kLowestIdle;
};

struct Record {
  Model model = Model::kElement;
  std::size_t n = 0;
  std::uint32_t procs = 0;
  std::uint64_t seed = 0;
  Metrics metrics;
  double imbalance = 1.0;
};

inline constexpr const char* kRecordHeader =
    "model,n,procs,seed,elements_processed,messages,sim_time,idle_time_total,imbalance,result_checksum";

// Runs one experiment and checks the Metrics invariants before returning.
inline Record run_record(const RunSpec& spec) {
  if (spec.n == 0 || spec.procs == 0) throw Error(ErrorKind::kInvalidArgument, "need n >= 1 and procs >= 1");
  Record rec{spec.model, spec.n, spec.procs, spec.seed, {}, 1.0};
  if (spec.model == Model::kElement) {
    const Program program = build_matmul_program(spec.n, spec.seed);
    MachineConfig machine{spec.procs, spec.seed, spec.dispatch};
    rec.metrics = simulate(program, machine, spec.costs).metrics;
  } else {
    rec.metrics = simulate_instruction_model(spec.n, spec.procs, spec.costs, spec.seed).metrics;
  }
  validate_metrics(rec.metrics);
  rec.imbalance = worker_busy_profile(rec.metrics);
  return rec;
}

inline std::string format_fixed(double v, int digits = 6) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline void write_csv_row(std::ostream& os, const Record& r) {
  os << to_string(r.model) << ',' << r.n << ',' << r.procs << ',' << r.seed << ','
     << r.metrics.elements_processed << ',' << r.metrics.messages << ',' << r.metrics.sim_time << ','
     << r.metrics.idle_time_total << ',' << format_fixed(r.imbalance) << ','
     << r.metrics.result_checksum << '\n';
}

inline nlohmann::ordered_json to_json(const Record& r) {
  nlohmann::ordered_json j;
  j["model"] = to_string(r.model);
  j["n"] = r.n;
  j["procs"] = r.procs;
  j["seed"] = r.seed;
  j["elements_processed"] = r.metrics.elements_processed;
  j["messages"] = r.metrics.messages;
  j["sim_time"] = r.metrics.sim_time;
  j["idle_time_total"] = r.metrics.idle_time_total;
  j["imbalance"] = std::stod(format_fixed(r.imbalance));
  j["result_checksum"] = r.metrics.result_checksum;
  return j;
}

inline void write_records(std::ostream& os, const std::vector<Record>& records, Format format) {
  if (format == Format::kCsv) {
    os << kRecordHeader << '\n';
    for (const Record& r : records) write_csv_row(os, r);
    return;
  }
  auto arr = nlohmann::ordered_json::array();
  for (const Record& r : records) arr.push_back(to_json(r));
  os << arr.dump(2) << '\n';
}

struct SweepSpec {
  std::vector<std::size_t> sizes{40, 60, 80, 100};
  std::vector<std::uint32_t> procs{2, 4, 8, 16};
  std::uint64_t seed = 0;
  CostModel costs;
  DispatchPolicy dispatch = DispatchPolicy::kLowestIdle;
  std::size_t max_size = 128;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (sizes.empty() || procs.empty()) throw Error(ErrorKind::kInvalidArgument, "sweep lists must be nonempty");
    for (const std::size_t n : sizes) {
      if (n == 0 || n > max_size) {
        throw Error(ErrorKind::kInvalidArgument,
                    "size " + std::to_string(n) + " outside [1, " + std::to_string(max_size) + "]");
      }
    }
    for (const std::uint32_t p : procs) {
      if (p == 0) throw Error(ErrorKind::kInvalidArgument, "processor counts must be >= 1");
    }
    costs.validate();
  }
};

struct MonotoneFlag {
  Model model;
  std::size_t n;
  bool decreasing;  // sim_time strictly decreasing as P grows
};

struct SweepResult {
  std::vector<Record> records;  // model, then n ascending, then P ascending
  std::vector<MonotoneFlag> summary;
};

// Cells run on a small thread pool; results land in their precomputed slot,
// so output does not depend on execution order.
inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::size_t> sizes = spec.sizes;
  std::vector<std::uint32_t> procs = spec.procs;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::sort(procs.begin(), procs.end());
  procs.erase(std::unique(procs.begin(), procs.end()), procs.end());

  std::vector<RunSpec> cells;
  for (const Model model : {Model::kElement, Model::kInstruction})
    for (const std::size_t n : sizes)
      for (const std::uint32_t p : procs)
        cells.push_back({model, n, p, spec.seed, spec.costs, spec.dispatch});

  SweepResult result;
  result.records.resize(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cells.size();) {
      try {
        result.records[k] = run_record(cells[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t k = 0; k < cells.size(); k += procs.size()) {
    bool decreasing = true;
    for (std::size_t q = 1; q < procs.size(); ++q) {
      decreasing &= result.records[k + q].metrics.sim_time < result.records[k + q - 1].metrics.sim_time;
    }
    result.summary.push_back({cells[k].model, cells[k].n, decreasing});
  }
  return result;
}

// CSV: records to `out`, the monotonicity summary as its own small CSV to
// `summary_out`. JSON: one document holding both, written to `out`.
inline void write_sweep(std::ostream& out, std::ostream& summary_out, const SweepResult& sweep,
                        Format format) {
  if (format == Format::kCsv) {
    write_records(out, sweep.records, Format::kCsv);
    summary_out << "model,n,sim_time_monotone_decreasing\n";
    for (const MonotoneFlag& f : sweep.summary) {
      summary_out << to_string(f.model) << ',' << f.n << ',' << (f.decreasing ? "true" : "false") << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc;
  doc["records"] = nlohmann::ordered_json::array();
  for (const Record& r : sweep.records) doc["records"].push_back(to_json(r));
  doc["summary"] = nlohmann::ordered_json::array();
  for (const MonotoneFlag& f : sweep.summary) {
    doc["summary"].push_back({{"model", to_string(f.model)},
                              {"n", f.n},
                              {"sim_time_monotone_decreasing", f.decreasing}});
  }
  out << doc.dump(2) << '\n';
}

struct CountRow {
  std::uint64_t n = 0;
  std::uint64_t reference_instructions = 0;
  std::uint64_t reference_elements = 0;
  std::uint64_t encoding_elements = 0;
  Ratio ratio;
};

inline std::vector<CountRow> count_table(const std::vector<std::uint64_t>& sizes) {
  std::vector<CountRow> rows;
  for (const std::uint64_t n : sizes) {
    rows.push_back({n, instruction_count(kInstructionCounts, n), element_count_reference(n),
                    encoding_element_count(n), ratio_report(n)});
  }
  return rows;
}

// Rows whose n appears in the published table must match it exactly.
inline bool counts_match_reference(const std::vector<CountRow>& rows) {
  for (const CountRow& r : rows) {
    for (std::size_t k = 0; k < ReferenceTables::kSizes.size(); ++k) {
      if (ReferenceTables::kSizes[k] != r.n) continue;
      if (r.reference_instructions != ReferenceTables::kTable5Instructions[k] ||
          r.reference_elements != ReferenceTables::kTable5Elements[k]) {
        return false;
      }
    }
  }
  return true;
}

inline void write_counts(std::ostream& os, const std::vector<CountRow>& rows, Format format) {
  if (format == Format::kCsv) {
    os << "n,reference_instructions,reference_elements,encoding_elements,ratio,ratio_exact\n";
    for (const CountRow& r : rows) {
      os << r.n << ',' << r.reference_instructions << ',' << r.reference_elements << ','
         << r.encoding_elements << ',' << format_fixed(r.ratio.value()) << ',' << r.ratio.num << '/'
         << r.ratio.den << '\n';
    }
    return;
  }
  auto arr = nlohmann::ordered_json::array();
  for (const CountRow& r : rows) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["reference_instructions"] = r.reference_instructions;
    j["reference_elements"] = r.reference_elements;
    j["encoding_elements"] = r.encoding_elements;
    j["ratio"] = std::stod(format_fixed(r.ratio.value()));
    j["ratio_exact"] = std::to_string(r.ratio.num) + "/" + std::to_string(r.ratio.den);
    arr.push_back(std::move(j));
  }
  os << arr.dump(2) << '\n';
}

// Prints the deduction trace of a demo program followed by its output.
// Returns false for an unknown demo name.
inline bool write_demo(std::ostream& os, std::string_view name) {
  Program program;
  if (name == "negate") {
    program = build_negate_demo();
  } else if (name == "square") {
    program = build_square_demo();
  } else {
    return false;
  }

  auto relation_text = [&](const Relation& r) {
    std::string s;
    for (std::size_t k = 0; k < r.input_identifiers.size(); ++k) {
      s += (k ? " x " : "") + program.name(r.input_identifiers[k]);
    }
    if (r.operation == Operation::kSink) return s + " -> sink";
    return s + " -> " + program.name(r.output_identifier) + " (" + std::string(to_string(r.operation)) + ")";
  };

  RunOptions options;
  options.trace = [&](const TraceEvent& ev) {
    switch (ev.kind) {
      case TraceEvent::Kind::kPop: os << "pop    " << program.describe(*ev.element) << '\n'; break;
      case TraceEvent::Kind::kStore: os << "hold   " << program.describe(*ev.element) << '\n'; break;
      case TraceEvent::Kind::kApply:
        os << "apply  " << (ev.relation ? relation_text(*ev.relation) : "discard") << '\n';
        break;
      case TraceEvent::Kind::kCreate: os << "create " << program.describe(*ev.element) << '\n'; break;
      case TraceEvent::Kind::kResult: os << "result " << program.describe(*ev.element) << '\n'; break;
    }
  };
  const RunResult result = run(program, options);
  os << "elements processed: " << result.elements_processed << '\n';
  for (const auto& [idx, v] : result.outputs) {
    os << "output " << program.describe({program.result_identifier, idx, v}) << '\n';
  }
  return true;
}

}  // namespace aridem
