#include "dmln/dmln.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "core/parser.hpp"
#include "core/session.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

dmln_status fail(dmln_status code, const std::string& msg) {
  set_error(msg);
  return code;
}

bool read_file(const char* path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  *out = ss.str();
  return true;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dmln::SessionConfig to_session_config(const dmln_config* config) {
  dmln::SessionConfig sc;
  if (!config) return sc;
  sc.marginal = config->marginal != 0;
  sc.monolithic = config->monolithic != 0;
  sc.iterations = config->iterations;
  sc.step = config->step;
  sc.constant_step = config->constant_step != 0;
  sc.seed = config->seed;
  sc.workers = config->workers;
  return sc;
}

}  // namespace

struct dmln_program {
  dmln::MLNProgram program;
};

struct dmln_session {
  dmln::Session session;
  dmln::SessionConfig config;
  explicit dmln_session(dmln::MLNProgram p) : session(std::move(p)) {}
};

struct dmln_result {
  dmln::RunResult result;
  std::string tsv;
  std::string trace;
};

extern "C" {

void dmln_config_init(dmln_config* config) {
  if (!config) return;
  config->marginal = 0;
  config->monolithic = 0;
  config->iterations = 100;
  config->step = 1.0;
  config->constant_step = 0;
  config->seed = 0;
  config->workers = 1;
}

const char* dmln_last_error(void) { return g_last_error.c_str(); }

dmln_status dmln_program_parse(const char* text, dmln_program** out) {
  if (!text || !out) return fail(DMLN_ERR_INVALID, "null argument");
  try {
    auto* handle = new dmln_program{dmln::parse_program(text)};
    *out = handle;
    return DMLN_OK;
  } catch (const std::exception& e) {
    return fail(DMLN_ERR_PARSE, e.what());
  }
}

dmln_status dmln_program_parse_file(const char* path, dmln_program** out) {
  if (!path || !out) return fail(DMLN_ERR_INVALID, "null argument");
  std::string text;
  if (!read_file(path, &text))
    return fail(DMLN_ERR_IO, std::string("cannot read ") + path);
  return dmln_program_parse(text.c_str(), out);
}

dmln_status dmln_program_load_evidence(dmln_program* program,
                                       const char* text) {
  if (!program || !text) return fail(DMLN_ERR_INVALID, "null argument");
  try {
    dmln::parse_evidence(text, program->program);
    return DMLN_OK;
  } catch (const std::exception& e) {
    return fail(DMLN_ERR_PARSE, e.what());
  }
}

dmln_status dmln_program_load_evidence_file(dmln_program* program,
                                            const char* path) {
  if (!program || !path) return fail(DMLN_ERR_INVALID, "null argument");
  std::string text;
  if (!read_file(path, &text))
    return fail(DMLN_ERR_IO, std::string("cannot read ") + path);
  return dmln_program_load_evidence(program, text.c_str());
}

dmln_status dmln_program_print(const dmln_program* program, char** out) {
  if (!program || !out) return fail(DMLN_ERR_INVALID, "null argument");
  *out = dup_string(dmln::print_program(program->program));
  return DMLN_OK;
}

void dmln_program_free(dmln_program* program) { delete program; }

dmln_status dmln_session_create(const dmln_program* program,
                                const dmln_config* config,
                                dmln_session** out) {
  if (!program || !out) return fail(DMLN_ERR_INVALID, "null argument");
  try {
    auto* handle = new dmln_session(program->program);
    handle->config = to_session_config(config);
    handle->session.compile(handle->config);
    *out = handle;
    return DMLN_OK;
  } catch (const std::exception& e) {
    return fail(DMLN_ERR_PARSE, e.what());
  }
}

dmln_status dmln_session_explain(const dmln_session* session, char** out) {
  if (!session || !out) return fail(DMLN_ERR_INVALID, "null argument");
  *out = dup_string(session->session.explain_text());
  return DMLN_OK;
}

void dmln_session_free(dmln_session* session) { delete session; }

dmln_status dmln_session_infer(dmln_session* session, dmln_result** out) {
  if (!session || !out) return fail(DMLN_ERR_INVALID, "null argument");
  try {
    auto* result = new dmln_result;
    result->result = session->session.infer(session->config);
    result->tsv = session->session.result_tsv(result->result,
                                              session->config.marginal, {});
    result->trace = dmln::Session::trace_tsv(result->result.stats);
    *out = result;
    if (result->result.infeasible)
      return fail(DMLN_ERR_INFEASIBLE, result->result.message);
    return DMLN_OK;
  } catch (const std::exception& e) {
    return fail(DMLN_ERR_INTERNAL, e.what());
  }
}

dmln_status dmln_result_tsv(const dmln_result* result, char** out) {
  if (!result || !out) return fail(DMLN_ERR_INVALID, "null argument");
  *out = dup_string(result->tsv);
  return DMLN_OK;
}

dmln_status dmln_session_result_tsv(const dmln_session* session,
                                    const dmln_result* result,
                                    const char* relations, char** out) {
  if (!session || !result || !out)
    return fail(DMLN_ERR_INVALID, "null argument");
  std::vector<std::string> filter;
  if (relations) {
    std::istringstream ss(relations);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) filter.push_back(item);
  }
  try {
    *out = dup_string(session->session.result_tsv(
        result->result, session->config.marginal, filter));
    return DMLN_OK;
  } catch (const std::exception& e) {
    return fail(DMLN_ERR_INTERNAL, e.what());
  }
}

dmln_status dmln_result_trace_tsv(const dmln_result* result, char** out) {
  if (!result || !out) return fail(DMLN_ERR_INVALID, "null argument");
  *out = dup_string(result->trace);
  return DMLN_OK;
}

int dmln_result_infeasible(const dmln_result* result) {
  return result && result->result.infeasible ? 1 : 0;
}

int dmln_result_iterations(const dmln_result* result) {
  return result ? result->result.stats.iterations : 0;
}

double dmln_result_final_cost(const dmln_result* result) {
  return result ? result->result.stats.final_cost : 0.0;
}

int dmln_result_certified(const dmln_result* result) {
  return result && result->result.stats.certified ? 1 : 0;
}

void dmln_result_free(dmln_result* result) { delete result; }

void dmln_string_free(char* s) { delete[] s; }

}  // extern "C"
