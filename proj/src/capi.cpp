#include "ahmsim/ahmsim_c.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "experiments.hpp"

using ahmsim::Error;
using ahmsim::ErrorKind;
using nlohmann::json;

struct ahmsim_session {
  json config;
  bool loaded = false;
  ahmsim::RunOverrides overrides;
  std::string last_error;
  ahmsim::RunOutcome last_outcome;
  bool has_outcome = false;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ahmsim_status status_from_kind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return AHMSIM_ERR_SCHEMA;
    case ErrorKind::invalid_argument:
      return AHMSIM_ERR_INVALID_ARGUMENT;
    default:
      return AHMSIM_ERR_NUMERICAL;
  }
}

template <typename Fn>
ahmsim_status guarded(ahmsim_session* s, Fn&& fn) {
  if (!s) return AHMSIM_ERR_INVALID_ARGUMENT;
  try {
    return fn();
  } catch (const Error& e) {
    s->last_error = e.what();
    return status_from_kind(e.kind());
  } catch (const json::exception& e) {
    s->last_error = e.what();
    return AHMSIM_ERR_SCHEMA;
  } catch (const std::exception& e) {
    s->last_error = e.what();
    return AHMSIM_ERR_UNKNOWN;
  } catch (...) {
    s->last_error = "unknown error";
    return AHMSIM_ERR_UNKNOWN;
  }
}

}  // namespace

extern "C" {

const char* ahmsim_version(void) { return "1.0.0"; }

ahmsim_status ahmsim_session_create(ahmsim_session** out) {
  if (!out) return AHMSIM_ERR_INVALID_ARGUMENT;
  *out = new (std::nothrow) ahmsim_session();
  return *out ? AHMSIM_OK : AHMSIM_ERR_UNKNOWN;
}

void ahmsim_session_destroy(ahmsim_session* session) { delete session; }

ahmsim_status ahmsim_session_load_config_file(ahmsim_session* session, const char* path) {
  return guarded(session, [&]() -> ahmsim_status {
    if (!path) {
      session->last_error = "null path";
      return AHMSIM_ERR_INVALID_ARGUMENT;
    }
    std::ifstream is(path);
    if (!is) {
      session->last_error = std::string("cannot open ") + path;
      return AHMSIM_ERR_IO;
    }
    std::stringstream buf;
    buf << is.rdbuf();
    session->config = json::parse(buf.str());
    session->loaded = true;
    return AHMSIM_OK;
  });
}

ahmsim_status ahmsim_session_load_config_json(ahmsim_session* session, const char* json_text) {
  return guarded(session, [&]() -> ahmsim_status {
    if (!json_text) {
      session->last_error = "null json text";
      return AHMSIM_ERR_INVALID_ARGUMENT;
    }
    session->config = json::parse(json_text);
    session->loaded = true;
    return AHMSIM_OK;
  });
}

ahmsim_status ahmsim_session_set_seed(ahmsim_session* session, uint64_t seed) {
  if (!session) return AHMSIM_ERR_INVALID_ARGUMENT;
  session->overrides.seed = seed;
  return AHMSIM_OK;
}

ahmsim_status ahmsim_session_set_output_dir(ahmsim_session* session, const char* dir) {
  if (!session || !dir) return AHMSIM_ERR_INVALID_ARGUMENT;
  session->overrides.output_dir = dir;
  return AHMSIM_OK;
}

ahmsim_status ahmsim_session_set_threads(ahmsim_session* session, int threads) {
  if (!session || threads < 0) return AHMSIM_ERR_INVALID_ARGUMENT;
  session->overrides.threads = threads;
  return AHMSIM_OK;
}

ahmsim_status ahmsim_session_validate(ahmsim_session* session, char** diagnostics_json) {
  return guarded(session, [&]() -> ahmsim_status {
    if (!session->loaded) {
      session->last_error = "no config loaded";
      return AHMSIM_ERR_INVALID_ARGUMENT;
    }
    const auto diags = ahmsim::validate_config(session->config);
    json arr = json::array();
    bool fatal = false;
    for (const auto& d : diags) {
      arr.push_back({{"path", d.path}, {"message", d.message}, {"fatal", d.fatal}});
      fatal |= d.fatal;
    }
    if (diagnostics_json) *diagnostics_json = dup_string(arr.dump(2));
    if (fatal) {
      session->last_error = "config has fatal diagnostics";
      return AHMSIM_ERR_SCHEMA;
    }
    return AHMSIM_OK;
  });
}

ahmsim_status ahmsim_session_run(ahmsim_session* session) {
  return guarded(session, [&]() -> ahmsim_status {
    if (!session->loaded) {
      session->last_error = "no config loaded";
      return AHMSIM_ERR_INVALID_ARGUMENT;
    }
    session->last_outcome = ahmsim::run_experiment(session->config, session->overrides);
    session->has_outcome = true;
    return AHMSIM_OK;
  });
}

ahmsim_status ahmsim_session_outputs(ahmsim_session* session, char** outputs_json) {
  return guarded(session, [&]() -> ahmsim_status {
    if (!session->has_outcome) {
      session->last_error = "no run completed";
      return AHMSIM_ERR_INVALID_ARGUMENT;
    }
    json out = {{"output_dir", session->last_outcome.output_dir},
                {"files", session->last_outcome.files_written}};
    if (outputs_json) *outputs_json = dup_string(out.dump(2));
    return AHMSIM_OK;
  });
}

const char* ahmsim_session_last_error(const ahmsim_session* session) {
  return session ? session->last_error.c_str() : "null session";
}

char* ahmsim_list_experiments_json(void) {
  json arr = json::array();
  for (const auto& e : ahmsim::experiment_registry())
    arr.push_back({{"name", e.name}, {"description", e.description}, {"figures", e.figures}});
  return dup_string(arr.dump(2));
}

void ahmsim_string_free(char* s) { delete[] s; }

}  // extern "C"
