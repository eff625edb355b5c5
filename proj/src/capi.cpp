#include "fermi/fermi.h"

#include <string>

#include "fermi/error.hpp"
#include "fermi/graph.hpp"
#include "fermi/runner.hpp"

struct fermi_config {
  fermi::Config config;
};

struct fermi_dispersion {
  fermi::DispersionPtr e;
};

struct fermi_graph {
  fermi::FeynmanGraph g;
};

struct fermi_result {
  fermi::RunResult r;
};

namespace {

thread_local std::string last_error;

template <typename F>
fermi_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return FERMI_OK;
  } catch (const fermi::Error& e) {
    last_error = e.what();
    return static_cast<fermi_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  }
  return FERMI_INTERNAL_ERROR;
}

void require(bool ok, const char* what) {
  if (!ok) fermi::fail(fermi::ErrorCode::InvalidArgument, what);
}

}  // namespace

extern "C" {

const char* fermi_last_error(void) { return last_error.c_str(); }

int fermi_exit_code(fermi_status status) { return fermi::exit_code_for(static_cast<fermi::ErrorCode>(status)); }

fermi_status fermi_config_load(const char* path, fermi_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new fermi_config{fermi::Config::load(path)};
  });
}

fermi_status fermi_config_parse(const char* text, const char* base_dir, fermi_config** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new fermi_config{fermi::Config::parse(text, base_dir ? base_dir : ".")};
  });
}

fermi_status fermi_config_set(fermi_config* config, const char* section, const char* key, const char* value) {
  return guarded([&] {
    require(config && section && key && value, "null argument");
    config->config.set(section, key, value);
  });
}

void fermi_config_free(fermi_config* config) { delete config; }

fermi_status fermi_dispersion_create(const char* family, const double* params, size_t count, fermi_dispersion** out) {
  return guarded([&] {
    require(family && out && (params || count == 0), "null argument");
    *out = new fermi_dispersion{fermi::make_dispersion(family, std::vector<double>(params, params + count))};
  });
}

fermi_status fermi_dispersion_from_config(const fermi_config* config, fermi_dispersion** out) {
  return guarded([&] {
    require(config && out, "null argument");
    *out = new fermi_dispersion{fermi::build_dispersion(config->config)};
  });
}

void fermi_dispersion_free(fermi_dispersion* e) { delete e; }

fermi_status fermi_dispersion_evaluate(const fermi_dispersion* e, double p1, double p2, int order, double jet[6]) {
  return guarded([&] {
    require(e && jet, "null argument");
    fermi::Jet j = fermi::evaluate_jet(*e->e, {p1, p2}, order);
    double v[6] = {j.value, j.grad.x, j.grad.y, j.hxx, j.hxy, j.hyy};
    for (int i = 0; i < 6; ++i) jet[i] = v[i];
  });
}

fermi_status fermi_fermi_radius(const fermi_dispersion* e, double theta, double* radius) {
  return guarded([&] {
    require(e && radius, "null argument");
    *radius = fermi::fermi_radius(*e->e, theta, fermi::default_bracket(theta));
  });
}

fermi_status fermi_trace_surface(const fermi_dispersion* e, int m_theta, double* theta, double* radius) {
  return guarded([&] {
    require(e && theta && radius, "null argument");
    fermi::FermiRadiusTable t = fermi::trace_surface(*e->e, m_theta);
    for (int i = 0; i < t.size(); ++i) {
      theta[i] = t.theta[i];
      radius[i] = t.radius[i];
    }
  });
}

fermi_status fermi_check_class(const fermi_dispersion* e, double delta0, double g0, double G0, double omega0,
                               int m_theta, int* verdict, double margins[4]) {
  return guarded([&] {
    require(e && verdict, "null argument");
    fermi::ClassParams p{delta0, g0, G0, omega0};
    fermi::ClassReport r = fermi::check_class(*e->e, p, m_theta);
    *verdict = r.verdict ? 1 : 0;
    if (margins) {
      margins[0] = r.margin_half_cell;
      margins[1] = r.margin_gradient;
      margins[2] = r.margin_c2;
      margins[3] = r.margin_curvature;
    }
  });
}

fermi_status fermi_radial_constants(double delta0, double g0, double G0, double omega0, double* g1, double* r0,
                                    double* eps_max) {
  return guarded([&] {
    require(g1 && r0 && eps_max, "null argument");
    fermi::RadialConstants c = fermi::derive_radial_constants({delta0, g0, G0, omega0});
    *g1 = c.g1;
    *r0 = c.r0;
    *eps_max = c.eps_max;
  });
}

fermi_status fermi_graph_parse(const char* edge_list, fermi_graph** out) {
  return guarded([&] {
    require(edge_list && out, "null argument");
    *out = new fermi_graph{fermi::parse_edge_list(edge_list)};
  });
}

void fermi_graph_free(fermi_graph* g) { delete g; }

fermi_status fermi_graph_is_one_pi(const fermi_graph* g, int* result) {
  return guarded([&] {
    require(g && result, "null argument");
    *result = fermi::is_one_pi(g->g) ? 1 : 0;
  });
}

fermi_status fermi_graph_spanning_tree_count(const fermi_graph* g, int64_t* count) {
  return guarded([&] {
    require(g && count, "null argument");
    *count = static_cast<int64_t>(fermi::spanning_trees(g->g).size());
  });
}

fermi_status fermi_graph_corpus_size(int max_vertices, int* size) {
  return guarded([&] {
    require(size != nullptr, "null argument");
    *size = static_cast<int>(fermi::enumerate_two_legged_1pi(max_vertices).size());
  });
}

fermi_status fermi_run(const char* command, const fermi_config* config, const fermi_run_options* options,
                       fermi_result** out) {
  return guarded([&] {
    require(command && out, "null argument");
    fermi::RunOptions o;
    if (options) {
      if (options->has_seed) o.seed = options->seed;
      o.max_vertices = options->max_vertices;
    }
    *out = new fermi_result{fermi::run_command(command, config ? &config->config : nullptr, o)};
  });
}

int fermi_result_exit_code(const fermi_result* r) { return r ? r->r.exit_code : fermi::kExitInternal; }

const char* fermi_result_message(const fermi_result* r) { return r ? r->r.message.c_str() : ""; }

size_t fermi_result_artifact_count(const fermi_result* r) { return r ? r->r.artifacts.size() : 0; }

const char* fermi_result_artifact_name(const fermi_result* r, size_t i) {
  return r && i < r->r.artifacts.size() ? r->r.artifacts[i].name.c_str() : nullptr;
}

const char* fermi_result_artifact_content(const fermi_result* r, size_t i) {
  return r && i < r->r.artifacts.size() ? r->r.artifacts[i].content.c_str() : nullptr;
}

void fermi_result_free(fermi_result* r) { delete r; }

}  // extern "C"
