#include "paver/paver.h"

#include <new>
#include <string>

#include "paver/pipeline.hpp"

struct paver_config {
  paver::RunConfig cfg;
};

struct paver_result {
  paver::PhaseOutput out;
};

namespace {

thread_local std::string last_error;

paver_status fail(paver_status s, const std::string &msg) {
  last_error = msg;
  return s;
}

paver_status set_string(paver_config *cfg, std::string paver::RunConfig::*field,
                        const char *value) {
  if (!cfg || !value)
    return fail(PAVER_ERR_USAGE, "null argument");
  cfg->cfg.*field = value;
  return PAVER_OK;
}

template <class Fn>
paver_status run_phase(const paver_config *cfg, paver_result **out, Fn phase) {
  if (!out)
    return fail(PAVER_ERR_USAGE, "null result pointer");
  *out = nullptr;
  if (!cfg)
    return fail(PAVER_ERR_USAGE, "null config");
  try {
    auto *r = new paver_result{phase(cfg->cfg)};
    *out = r;
    last_error.clear();
    return PAVER_OK;
  } catch (const paver::Error &e) {
    return fail(static_cast<paver_status>(e.kind()), e.what());
  } catch (const std::bad_alloc &) {
    return fail(PAVER_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(PAVER_ERR_INTERNAL, e.what());
  }
}

} // namespace

extern "C" {

const char *paver_version(void) { return "0.1.0"; }

const char *paver_last_error(void) { return last_error.c_str(); }

paver_config *paver_config_create(void) { return new (std::nothrow) paver_config{}; }

void paver_config_destroy(paver_config *cfg) { delete cfg; }

paver_status paver_config_set_program(paver_config *cfg, const char *path) {
  return set_string(cfg, &paver::RunConfig::program, path);
}

paver_status paver_config_set_vuln(paver_config *cfg, const char *path) {
  return set_string(cfg, &paver::RunConfig::vuln, path);
}

paver_status paver_config_set_suite(paver_config *cfg, const char *path) {
  return set_string(cfg, &paver::RunConfig::suite, path);
}

paver_status paver_config_set_out(paver_config *cfg, const char *dir) {
  return set_string(cfg, &paver::RunConfig::out, dir);
}

paver_status paver_config_set_mode(paver_config *cfg, paver_mode mode) {
  if (!cfg)
    return fail(PAVER_ERR_USAGE, "null config");
  switch (mode) {
  case PAVER_MODE_AUTO: cfg->cfg.mode = paver::InputMode::Auto; break;
  case PAVER_MODE_MINILANG: cfg->cfg.mode = paver::InputMode::MiniLang; break;
  case PAVER_MODE_GRAPH: cfg->cfg.mode = paver::InputMode::Graph; break;
  default: return fail(PAVER_ERR_USAGE, "unknown mode");
  }
  return PAVER_OK;
}

paver_status paver_config_set_cap(paver_config *cfg, uint64_t cap) {
  if (!cfg)
    return fail(PAVER_ERR_USAGE, "null config");
  if (cap < 1)
    return fail(PAVER_ERR_USAGE, "cap must be at least 1");
  cfg->cfg.cap = static_cast<std::size_t>(cap);
  return PAVER_OK;
}

paver_status paver_config_set_max_steps(paver_config *cfg, int64_t steps) {
  if (!cfg)
    return fail(PAVER_ERR_USAGE, "null config");
  if (steps < 1)
    return fail(PAVER_ERR_USAGE, "max steps must be at least 1");
  cfg->cfg.limits.max_steps = steps;
  return PAVER_OK;
}

paver_status paver_config_set_jobs(paver_config *cfg, unsigned jobs) {
  if (!cfg)
    return fail(PAVER_ERR_USAGE, "null config");
  if (jobs < 1)
    return fail(PAVER_ERR_USAGE, "jobs must be at least 1");
  cfg->cfg.jobs = jobs;
  return PAVER_OK;
}

paver_status paver_config_set_seed(paver_config *cfg, uint64_t seed) {
  if (!cfg)
    return fail(PAVER_ERR_USAGE, "null config");
  cfg->cfg.seed = seed;
  return PAVER_OK;
}

paver_status paver_analyze(const paver_config *cfg, paver_result **out) {
  return run_phase(cfg, out, paver::cmd_analyze);
}

paver_status paver_locate(const paver_config *cfg, paver_result **out) {
  return run_phase(cfg, out, paver::cmd_locate);
}

paver_status paver_evaluate(const paver_config *cfg, paver_result **out) {
  return run_phase(cfg, out, paver::cmd_evaluate);
}

paver_status paver_run_all(const paver_config *cfg, paver_result **out) {
  return run_phase(cfg, out, paver::cmd_all);
}

const char *paver_result_json(const paver_result *r) { return r ? r->out.json.c_str() : ""; }

const char *paver_result_text(const paver_result *r) { return r ? r->out.text.c_str() : ""; }

size_t paver_result_file_count(const paver_result *r) { return r ? r->out.written.size() : 0; }

const char *paver_result_file(const paver_result *r, size_t i) {
  if (!r || i >= r->out.written.size())
    return nullptr;
  return r->out.written[i].c_str();
}

size_t paver_result_warning_count(const paver_result *r) {
  return r ? r->out.diagnostics.size() : 0;
}

void paver_result_destroy(paver_result *r) { delete r; }

} // extern "C"
