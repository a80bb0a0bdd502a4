#include <CLI11.hpp>

#include <iostream>

#include "aara/constraints.hpp"
#include "aara/frontend.hpp"
#include "aara/harness.hpp"
#include "aara/report.hpp"

using namespace aara;

namespace {

enum Exit { kOk = 0, kFailure = 1, kFrontend = 2, kInfeasible = 3, kViolation = 4 };

struct BasisFlags {
  std::string kind = "stirling";
  int poly = 1;
  int exp = 1;
  bool demotion = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--basis", kind, "binomial, stirling or mixed")
        ->check(CLI::IsMember({"binomial", "stirling", "mixed"}))
        ->capture_default_str();
    cmd->add_option("--poly-degree", poly, "maximal binomial degree K")->capture_default_str();
    cmd->add_option("--exp-degree", exp, "maximal Stirling degree B")->capture_default_str();
    cmd->add_flag("--demotion", demotion, "allow demoting exponential potential (mixed only)");
  }

  BasisConfig config() const {
    BasisConfig cfg;
    switch (parse_basis_kind(kind)) {
      case BasisKind::Binomial: cfg = BasisConfig::binomial(poly); break;
      case BasisKind::Stirling: cfg = BasisConfig::stirling(exp); break;
      case BasisKind::Mixed: cfg = BasisConfig::mixed(poly, exp); break;
    }
    cfg.demotion = demotion;
    cfg.validate();
    return cfg;
  }
};

// Reports an analysis that did not reach an optimum. Returns the exit code.
int report_failure(const Analysis& a) {
  std::cerr << "analysis: " << to_string(a.outcome.status) << "\n" << a.diagnosis << "\n";
  return a.outcome.status == LpOutcome::Status::Infeasible ? kInfeasible : kFailure;
}

int run_analyze(const std::string& file, const BasisFlags& basis, const std::string& entry, bool json) {
  Analysis a = analyze(load_program(file), basis.config(), entry);
  if (!a.outcome.optimal()) return report_failure(a);
  std::cout << render_report(make_report(a), json ? ReportFormat::Json : ReportFormat::Text);
  return kOk;
}

int run_eval(const std::string& file, const std::string& entry, const std::string& input, std::uint64_t fuel) {
  Program p = load_program(file);
  const std::string fn = entry.empty() ? p.functions().back().name : entry;
  Value arg = parse_value(input);
  try {
    CostOutcome r = eval(p, fn, arg, fuel);
    std::cout << "value: " << r.value.str() << "\nq: " << to_string(r.q) << "\nq': " << to_string(r.q_out)
              << "\nsteps: " << r.steps << "\n";
    return kOk;
  } catch (const FuelExhausted& e) {
    std::cout << "out of fuel after " << fuel << " steps\nwatermark: " << to_string(e.partial().watermark) << "\n";
    return kFailure;
  }
}

int run_check(const std::string& file, const BasisFlags& basis, const std::string& entry, const EnumOptions& opts,
              std::uint64_t fuel) {
  Program p = load_program(file);
  Analysis a = analyze(p, basis.config(), entry);
  if (!a.outcome.optimal()) return report_failure(a);
  const AnalysisReport report = make_report(a);
  const std::string fn = a.system.entry;
  const FunctionReport* sig = nullptr;
  for (const auto& f : report.functions)
    if (f.function == fn) sig = &f;
  std::cout << render_signature_line(*sig) << "\n";
  auto inputs = enumerate_inputs(*p.find(fn)->param_type, opts);
  BoundCheckReport r = check_bound(p, fn, *sig, inputs, fuel);
  for (const auto& c : r.inputs) {
    if (!c.violation) continue;
    std::cout << "violation: " << c.input.str();
    if (!c.error.empty()) std::cout << " (" << c.error << ")";
    else std::cout << " measured " << to_string(c.measured.q) << "/" << to_string(c.measured.q_out) << ", bound "
                   << to_string(c.bound);
    std::cout << "\n";
  }
  std::cout << r.summary() << "\n";
  return r.ok() ? kOk : kViolation;
}

int run_dump(const std::string& file, const BasisFlags& basis, const std::string& entry) {
  ConstraintSystem sys = gen_constraints(load_program(file), basis.config(), entry);
  if (sys.objectives.empty()) return kOk;
  std::cout << emit_lp_text(sys.lp, sys.objectives.front());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amortized resource analysis with exponential potential"};
  app.require_subcommand(1);

  std::string file, entry, input;
  std::uint64_t fuel = 10'000'000;
  bool json = false;
  BasisFlags basis;
  EnumOptions opts;
  std::int64_t lo = -3, hi = 3;

  auto* analyze_cmd = app.add_subcommand("analyze", "infer annotated signatures and bounds");
  auto* eval_cmd = app.add_subcommand("eval", "run the cost semantics on one input");
  auto* check_cmd = app.add_subcommand("check-bound", "compare the inferred bound with measured cost");
  auto* dump_cmd = app.add_subcommand("dump-lp", "print the generated linear program");
  for (auto* cmd : {analyze_cmd, eval_cmd, check_cmd, dump_cmd}) {
    cmd->add_option("FILE", file, "source file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--entry", entry, "function to analyze (default: the last one)");
  }
  for (auto* cmd : {analyze_cmd, check_cmd, dump_cmd}) basis.attach(cmd);
  analyze_cmd->add_flag("--json", json, "emit the JSON report");
  eval_cmd->add_option("--input", input, "argument literal, e.g. \"([1,2],3)\"")->required();
  for (auto* cmd : {eval_cmd, check_cmd}) cmd->add_option("--fuel", fuel, "step budget")->capture_default_str();
  check_cmd->add_option("--max-size", opts.max_size, "longest input list")->capture_default_str();
  check_cmd->add_option("--seed", opts.seed, "sampler seed")->capture_default_str();
  check_cmd->add_option("--min-int", lo, "smallest list element")->capture_default_str();
  check_cmd->add_option("--max-int", hi, "largest list element")->capture_default_str();
  check_cmd->add_option("--exhaustive-limit", opts.exhaustive_limit, "values per length before sampling")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  opts.lo = lo;
  opts.hi = hi;

  try {
    if (analyze_cmd->parsed()) return run_analyze(file, basis, entry, json);
    if (eval_cmd->parsed()) return run_eval(file, entry, input, fuel);
    if (check_cmd->parsed()) return run_check(file, basis, entry, opts, fuel);
    if (dump_cmd->parsed()) return run_dump(file, basis, entry);
  } catch (const FrontendError& e) {
    std::cerr << e.what() << "\n";
    return kFrontend;
  } catch (const RuntimeError& e) {
    std::cerr << "runtime error at " << e.span().str() << ": " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
