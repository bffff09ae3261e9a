// dmln command line: compile and run Markov Logic programs.
//
// Exit codes: 0 success, 2 input error, 3 hard-rule infeasibility.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmln/dmln.h"

namespace {

struct Options {
  std::string program_path;
  std::string evidence_path;
  std::string output_path;
  std::string trace_path;
  std::vector<std::string> query;
  std::string mode = "map";
  int iterations = 100;
  double step = 1.0;
  std::string schedule = "decay";
  std::uint64_t seed = 0;
  bool monolithic = false;
  int workers = 1;
};

int input_error(const std::string& what) {
  std::cerr << "error: " << what << "\n";
  return 2;
}

struct StringHandle {
  char* value = nullptr;
  ~StringHandle() { dmln_string_free(value); }
};

int load(const Options& opt, dmln_program** program) {
  if (dmln_program_parse_file(opt.program_path.c_str(), program) != DMLN_OK)
    return input_error(dmln_last_error());
  if (!opt.evidence_path.empty() &&
      dmln_program_load_evidence_file(*program, opt.evidence_path.c_str()) !=
          DMLN_OK) {
    dmln_program_free(*program);
    *program = nullptr;
    return input_error(dmln_last_error());
  }
  return 0;
}

void fill_config(const Options& opt, dmln_config* config) {
  dmln_config_init(config);
  config->marginal = opt.mode == "marginal" ? 1 : 0;
  config->monolithic = opt.monolithic ? 1 : 0;
  config->iterations = opt.iterations;
  config->step = opt.step;
  config->constant_step = opt.schedule == "constant" ? 1 : 0;
  config->seed = opt.seed;
  config->workers = opt.workers;
}

int run_compile(const Options& opt) {
  dmln_program* program = nullptr;
  if (int rc = load(opt, &program)) return rc;
  dmln_config config;
  fill_config(opt, &config);
  dmln_session* session = nullptr;
  if (dmln_session_create(program, &config, &session) != DMLN_OK) {
    dmln_program_free(program);
    return input_error(dmln_last_error());
  }
  StringHandle text;
  dmln_session_explain(session, &text.value);
  std::cout << text.value;
  dmln_session_free(session);
  dmln_program_free(program);
  return 0;
}

int run_infer(const Options& opt) {
  dmln_program* program = nullptr;
  if (int rc = load(opt, &program)) return rc;
  dmln_config config;
  fill_config(opt, &config);
  dmln_session* session = nullptr;
  if (dmln_session_create(program, &config, &session) != DMLN_OK) {
    dmln_program_free(program);
    return input_error(dmln_last_error());
  }
  dmln_result* result = nullptr;
  dmln_status status = dmln_session_infer(session, &result);
  int rc = 0;
  if (status == DMLN_ERR_INFEASIBLE) {
    std::cerr << "infeasible: " << dmln_last_error() << "\n";
    rc = 3;
  } else if (status != DMLN_OK) {
    dmln_session_free(session);
    dmln_program_free(program);
    return input_error(dmln_last_error());
  }

  std::string filter;
  for (size_t i = 0; i < opt.query.size(); ++i) {
    if (i) filter += ',';
    filter += opt.query[i];
  }
  StringHandle rows;
  if (dmln_session_result_tsv(session, result,
                              filter.empty() ? nullptr : filter.c_str(),
                              &rows.value) == DMLN_OK) {
    if (opt.output_path.empty()) {
      std::cout << rows.value;
    } else {
      std::ofstream out(opt.output_path, std::ios::binary);
      if (!out) {
        rc = input_error("cannot write " + opt.output_path);
      } else {
        out << rows.value;
      }
    }
  }
  if (!opt.trace_path.empty()) {
    StringHandle trace;
    dmln_result_trace_tsv(result, &trace.value);
    std::ofstream out(opt.trace_path, std::ios::binary);
    if (!out)
      rc = input_error("cannot write " + opt.trace_path);
    else
      out << trace.value;
  }
  dmln_result_free(result);
  dmln_session_free(session);
  dmln_program_free(program);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dmln: Markov Logic inference by task decomposition"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-i,--program", opt.program_path, "program file (.mln)")
        ->required();
    cmd->add_option("-e,--evidence", opt.evidence_path, "evidence file (.db)");
    cmd->add_flag("--monolithic", opt.monolithic,
                  "disable decomposition: one generic task");
  };

  CLI::App* compile = app.add_subcommand("compile", "print the logical plan");
  add_common(compile);

  CLI::App* infer = app.add_subcommand("infer", "run inference");
  add_common(infer);
  infer->add_option("-q,--query", opt.query,
                    "output only these relations (repeatable)");
  infer->add_option("-o,--output", opt.output_path, "result file (stdout if absent)");
  infer->add_option("--mode", opt.mode, "map|marginal")
      ->check(CLI::IsMember({"map", "marginal"}));
  infer->add_option("--iters", opt.iterations, "iteration budget")
      ->check(CLI::PositiveNumber);
  infer->add_option("--step", opt.step, "initial gradient step size");
  infer->add_option("--schedule", opt.schedule, "constant|decay")
      ->check(CLI::IsMember({"constant", "decay"}));
  infer->add_option("--seed", opt.seed, "random seed");
  infer->add_option("--trace", opt.trace_path, "write per-iteration trace TSV");
  infer->add_option("--workers", opt.workers, "concurrent task solves")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (compile->parsed()) return run_compile(opt);
  return run_infer(opt);
}
