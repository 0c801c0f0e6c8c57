#include "hypertoric/hypertoric.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "error.hpp"
#include "report.hpp"
#include "schema.hpp"

using namespace hypertoric;

struct ht_config {
  config::FlatConfiguration cfg;
};

namespace {

thread_local std::string last_error;

ht_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema:
    case ErrorCode::kZeroVector:
      return HT_ERR_SCHEMA;
    case ErrorCode::kDomain:
    case ErrorCode::kNoUnimodularSubset:
    case ErrorCode::kNonCoercive:
    case ErrorCode::kDegeneratePotential:
      return HT_ERR_DOMAIN;
    case ErrorCode::kSingularity:
      return HT_ERR_SINGULARITY;
    case ErrorCode::kOrdering:
      return HT_ERR_ORDERING;
    case ErrorCode::kConvergence:
    case ErrorCode::kNoCertifiedTail:
      return HT_ERR_CONVERGENCE;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kArity:
    case ErrorCode::kPrecondition:
      return HT_ERR_ARGUMENT;
  }
  return HT_ERR_INTERNAL;
}

ht_status fail(ht_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
ht_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return HT_OK;
  } catch (const moment::NonCoerciveError& e) {
    std::ostringstream msg;
    msg << e.what() << " (direction:";
    for (double d : e.direction()) msg << ' ' << d;
    msg << ')';
    return fail(map_code(e.code()), msg.str());
  } catch (const Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HT_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

io::RunOptions run_options(const ht_options* o) {
  ht_options d;
  ht_options_default(&d);
  if (!o) o = &d;
  io::RunOptions r;
  r.window = o->window;
  r.truncation = o->truncation;
  r.tol = o->tol;
  r.identity_tol = o->identity_tol;
  r.h = o->h;
  if (o->box > 0) r.box = o->box;
  r.seed = o->seed;
  r.samples = o->samples;
  if (!(r.tol >= 0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  if (!(r.identity_tol > 0)) throw Error(ErrorCode::kInvalidArgument, "identity tolerance must be > 0");
  if (!(r.h > 0)) throw Error(ErrorCode::kInvalidArgument, "step h must be > 0");
  if (r.truncation == 0) throw Error(ErrorCode::kInvalidArgument, "truncation must be >= 1");
  return r;
}

void emit(const io::Report& r, char** report, int* pass) {
  *report = copy_string(r.json.dump(2) + "\n");
  if (pass) *pass = r.pass ? 1 : 0;
}

template <class F>
auto labelled(const char* label, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(label) + ": " + e.what());
  }
}

void require_out(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

void ht_options_default(ht_options* options) {
  if (!options) return;
  const io::RunOptions d;
  options->window = d.window;
  options->truncation = d.truncation;
  options->tol = d.tol;
  options->identity_tol = d.identity_tol;
  options->h = d.h;
  options->box = 0.0;
  options->seed = d.seed;
  options->samples = d.samples;
}

const char* ht_last_error(void) { return last_error.c_str(); }

const char* ht_status_name(ht_status status) {
  switch (status) {
    case HT_OK: return "ok";
    case HT_ERR_SCHEMA: return "schema error";
    case HT_ERR_DOMAIN: return "domain error";
    case HT_ERR_SINGULARITY: return "singularity";
    case HT_ERR_ORDERING: return "ordering error";
    case HT_ERR_CONVERGENCE: return "convergence error";
    case HT_ERR_ARGUMENT: return "invalid argument";
    case HT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ht_status ht_config_parse(const char* json, ht_config** out) {
  return guarded([&] {
    require_out(json, "json");
    require_out(out, "out");
    *out = new ht_config{io::parse_config(json)};
  });
}

ht_status ht_config_load(const char* path, ht_config** out) {
  return guarded([&] {
    require_out(path, "path");
    require_out(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kSchema, std::string("cannot open ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    try {
      *out = new ht_config{io::parse_config(text.str())};
    } catch (const Error& e) {
      throw Error(e.code(), std::string(path) + ": " + e.what());
    }
  });
}

ht_status ht_config_builtin_goto(size_t n, size_t prefix_depth, ht_config** out) {
  return guarded([&] {
    require_out(out, "out");
    *out = new ht_config{config::builtin_goto(n, prefix_depth)};
  });
}

ht_status ht_config_serialize(const ht_config* config, char** out) {
  return guarded([&] {
    require_out(config, "config");
    require_out(out, "out");
    *out = copy_string(io::serialize_config(config->cfg));
  });
}

size_t ht_config_rank(const ht_config* config) { return config ? config->cfg.rank() : 0; }

int ht_config_equal(const ht_config* a, const ht_config* b) {
  if (!a || !b) return 0;
  return a->cfg == b->cfg ? 1 : 0;
}

void ht_config_free(ht_config* config) { delete config; }

ht_status ht_validate(const ht_config* config, const ht_options* options, char** report, int* pass) {
  return guarded([&] {
    require_out(config, "config");
    require_out(report, "report");
    emit(io::validate_report(config->cfg, run_options(options)), report, pass);
  });
}

ht_status ht_topology(const ht_config* config, const ht_options* options, char** report) {
  return guarded([&] {
    require_out(config, "config");
    require_out(report, "report");
    emit(io::topology_report(config->cfg, run_options(options)), report, nullptr);
  });
}

ht_status ht_topology_plot(const char* report, char** text) {
  return guarded([&] {
    require_out(report, "report");
    require_out(text, "text");
    *text = copy_string(io::plot_text(io::parse_json(report)));
  });
}

ht_status ht_eval(const ht_config* config, const char* points_csv, const char* deformation_json,
                  const ht_options* options, char** report, int* pass) {
  return guarded([&] {
    require_out(config, "config");
    require_out(points_csv, "points_csv");
    require_out(report, "report");
    const auto opts = run_options(options);
    const auto points = labelled("points", [&] { return io::parse_points(points_csv, config->cfg.rank()); });
    const auto deformation =
        deformation_json ? labelled("deformation", [&] {
          return io::parse_deformation(io::parse_json(deformation_json), config->cfg.rank());
        })
                         : std::nullopt;
    emit(io::eval_report(config->cfg, points, deformation, opts), report, pass);
  });
}

ht_status ht_identities(const ht_config* config, const char* points_csv, const char* deformation_json,
                        const ht_options* options, char** report, int* pass) {
  return guarded([&] {
    require_out(config, "config");
    require_out(report, "report");
    const auto opts = run_options(options);
    std::vector<config::BasePoint> points;
    if (points_csv) points = labelled("points", [&] { return io::parse_points(points_csv, config->cfg.rank()); });
    const auto deformation =
        deformation_json ? labelled("deformation", [&] {
          return io::parse_deformation(io::parse_json(deformation_json), config->cfg.rank());
        })
                         : std::nullopt;
    emit(io::identities_report(config->cfg, points, deformation, opts), report, pass);
  });
}

ht_status ht_solve_moment(const char* problem_json, const ht_options* options, char** report) {
  return guarded([&] {
    require_out(problem_json, "problem_json");
    require_out(report, "report");
    const auto problem = labelled("problem", [&] { return io::parse_moment_problem(problem_json); });
    emit(io::solve_moment_report(problem, run_options(options)), report, nullptr);
  });
}

ht_status ht_periodic(const char* families_json, const char* points_csv, const ht_options* options, char** report,
                      int* pass) {
  return guarded([&] {
    require_out(families_json, "families_json");
    require_out(points_csv, "points_csv");
    require_out(report, "report");
    const auto input = labelled("families", [&] { return io::parse_periodic(families_json); });
    const auto points = labelled("points", [&] { return io::parse_points(points_csv, input.rank); });
    emit(io::periodic_report(input, points, run_options(options)), report, pass);
  });
}

void ht_string_free(char* text) { std::free(text); }

}  // extern "C"
