#include "difflab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "difflab/errors.hpp"
#include "difflab/nonlinearity.hpp"

namespace difflab {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string elem(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  expect_object(j, path);
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(child(path, item.key()), "unknown field");
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double as_positive(const json& j, const std::string& path) {
  double v = as_double(j, path);
  if (!(v > 0.0) || !std::isfinite(v)) fail(path, "expected a positive number");
  return v;
}

double as_finite(const json& j, const std::string& path) {
  double v = as_double(j, path);
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& path,
                                   bool positive) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(positive ? as_positive(j[i], elem(path, i))
                           : as_finite(j[i], elem(path, i)));
  }
  return out;
}

Point as_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3)
    fail(path, "expected an array of 2 or 3 coordinates");
  Point p{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < j.size(); ++i)
    p[i] = as_finite(j[i], elem(path, i));
  return p;
}

Primitive parse_primitive(const json& j, const std::string& path) {
  expect_object(j, path);
  const json* type = find(j, "type");
  if (!type) fail(child(path, "type"), "missing field");
  const std::string t = as_string(*type, child(path, "type"));
  if (t == "ball") {
    check_keys(j, path, {"type", "center", "radius"});
    Ball b;
    if (const json* c = find(j, "center")) b.center = as_point(*c, child(path, "center"));
    if (const json* r = find(j, "radius")) b.radius = as_positive(*r, child(path, "radius"));
    return b;
  }
  if (t == "ellipse") {
    check_keys(j, path, {"type", "center", "semi_axes"});
    Ellipse e;
    if (const json* c = find(j, "center")) e.center = as_point(*c, child(path, "center"));
    const json* ax = find(j, "semi_axes");
    if (!ax) fail(child(path, "semi_axes"), "missing field");
    e.semi_axes = as_point(*ax, child(path, "semi_axes"));
    for (int i = 0; i < 3; ++i) {
      if (e.semi_axes[i] < 0.0)
        fail(child(path, "semi_axes"), "expected nonnegative semi-axes");
    }
    if (e.semi_axes[2] == 0.0) e.semi_axes[2] = 1.0;
    return e;
  }
  if (t == "capsule") {
    check_keys(j, path, {"type", "p0", "p1", "radius"});
    Capsule c;
    const json* p0 = find(j, "p0");
    const json* p1 = find(j, "p1");
    if (!p0) fail(child(path, "p0"), "missing field");
    if (!p1) fail(child(path, "p1"), "missing field");
    c.p0 = as_point(*p0, child(path, "p0"));
    c.p1 = as_point(*p1, child(path, "p1"));
    if (const json* r = find(j, "radius")) c.radius = as_positive(*r, child(path, "radius"));
    return c;
  }
  fail(child(path, "type"), "expected one of ball, ellipse, capsule");
}

DomainSpec parse_domain(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "dimension", "primitives", "bbox"});
  DomainSpec spec;
  if (const json* k = find(j, "kind")) {
    const std::string s = as_string(*k, child(path, "kind"));
    if (s == "interior")
      spec.kind = DomainKind::interior;
    else if (s == "exterior")
      spec.kind = DomainKind::exterior;
    else if (s == "annulus")
      spec.kind = DomainKind::annulus;
    else
      fail(child(path, "kind"), "expected one of interior, exterior, annulus");
  }
  if (const json* d = find(j, "dimension"))
    spec.dimension = as_int(*d, child(path, "dimension"));
  const json* prims = find(j, "primitives");
  if (!prims) fail(child(path, "primitives"), "missing field");
  if (!prims->is_array() || prims->empty())
    fail(child(path, "primitives"), "expected a nonempty array");
  for (std::size_t i = 0; i < prims->size(); ++i) {
    spec.primitives.push_back(
        parse_primitive((*prims)[i], elem(child(path, "primitives"), i)));
  }
  if (const json* bb = find(j, "bbox")) {
    check_keys(*bb, child(path, "bbox"), {"lo", "hi"});
    const json* lo = find(*bb, "lo");
    const json* hi = find(*bb, "hi");
    if (!lo) fail(child(child(path, "bbox"), "lo"), "missing field");
    if (!hi) fail(child(child(path, "bbox"), "hi"), "missing field");
    spec.bbox.lo = as_point(*lo, child(child(path, "bbox"), "lo"));
    spec.bbox.hi = as_point(*hi, child(child(path, "bbox"), "hi"));
  }
  validate(spec);
  return spec;
}

TimeStepping parse_stepping(const json& j, const std::string& path) {
  check_keys(j, path,
             {"policy", "dt_initial", "growth", "dt_max", "rho", "dt_min"});
  TimeStepping st;
  if (const json* p = find(j, "policy")) {
    const std::string s = as_string(*p, child(path, "policy"));
    if (s == "geometric")
      st.policy = TimeStepPolicy::geometric;
    else if (s == "proportional")
      st.policy = TimeStepPolicy::proportional;
    else
      fail(child(path, "policy"), "expected geometric or proportional");
  }
  if (const json* v = find(j, "dt_initial")) {
    st.dt_initial = as_finite(*v, child(path, "dt_initial"));
    if (st.dt_initial < 0.0)
      fail(child(path, "dt_initial"), "expected a nonnegative number");
  }
  if (const json* v = find(j, "growth")) {
    st.growth = as_positive(*v, child(path, "growth"));
    if (st.growth < 1.0) fail(child(path, "growth"), "expected growth >= 1");
  }
  if (const json* v = find(j, "dt_max")) st.dt_max = as_positive(*v, child(path, "dt_max"));
  if (const json* v = find(j, "rho")) st.rho = as_positive(*v, child(path, "rho"));
  if (const json* v = find(j, "dt_min")) st.dt_min = as_positive(*v, child(path, "dt_min"));
  return st;
}

MeshSpec parse_mesh(const json& j, const std::string& path) {
  check_keys(j, path,
             {"r_lo", "r_hi", "h_min", "grade_ratio", "h_max", "attractors", "h"});
  MeshSpec mesh;
  if (const json* v = find(j, "r_lo")) mesh.r_lo = as_finite(*v, child(path, "r_lo"));
  if (const json* v = find(j, "r_hi")) mesh.r_hi = as_finite(*v, child(path, "r_hi"));
  if (mesh.r_hi <= mesh.r_lo) fail(child(path, "r_hi"), "expected r_hi > r_lo");
  if (const json* v = find(j, "h_min")) mesh.h_min = as_positive(*v, child(path, "h_min"));
  if (const json* v = find(j, "grade_ratio")) {
    mesh.grade_ratio = as_positive(*v, child(path, "grade_ratio"));
    if (mesh.grade_ratio < 1.0)
      fail(child(path, "grade_ratio"), "expected a ratio >= 1");
  }
  if (const json* v = find(j, "h_max")) mesh.h_max = as_positive(*v, child(path, "h_max"));
  if (mesh.h_max < mesh.h_min) fail(child(path, "h_max"), "expected h_max >= h_min");
  if (const json* v = find(j, "attractors"))
    mesh.attractors = as_number_list(*v, child(path, "attractors"), false);
  if (const json* v = find(j, "h")) mesh.h = as_positive(*v, child(path, "h"));
  return mesh;
}

NumericsSpec parse_numerics(const json& j, const std::string& path) {
  check_keys(j, path,
             {"representation", "stepping", "newton_tol", "max_newton_iter",
              "max_halvings", "log_seed_time", "log_seed_offset",
              "check_maximum_principle", "mesh", "times", "epsilons",
              "ref_times", "K", "envelope_tol", "tol", "tau", "surface_offset",
              "surface_samples", "moment_radii", "band_limit"});
  NumericsSpec num;
  if (const json* r = find(j, "representation")) {
    const std::string s = as_string(*r, child(path, "representation"));
    if (s == "primal")
      num.options.representation = Representation::primal;
    else if (s == "logarithmic")
      num.options.representation = Representation::logarithmic;
    else
      fail(child(path, "representation"), "expected primal or logarithmic");
  }
  if (const json* st = find(j, "stepping"))
    num.options.stepping = parse_stepping(*st, child(path, "stepping"));
  if (const json* v = find(j, "newton_tol"))
    num.options.newton_tol = as_positive(*v, child(path, "newton_tol"));
  if (const json* v = find(j, "max_newton_iter")) {
    num.options.max_newton_iter = as_int(*v, child(path, "max_newton_iter"));
    if (num.options.max_newton_iter < 1)
      fail(child(path, "max_newton_iter"), "expected a positive integer");
  }
  if (const json* v = find(j, "max_halvings")) {
    num.options.max_halvings = as_int(*v, child(path, "max_halvings"));
    if (num.options.max_halvings < 0)
      fail(child(path, "max_halvings"), "expected a nonnegative integer");
  }
  if (const json* v = find(j, "log_seed_time"))
    num.options.log_seed_time = as_positive(*v, child(path, "log_seed_time"));
  if (const json* v = find(j, "log_seed_offset"))
    num.options.log_seed_offset = as_positive(*v, child(path, "log_seed_offset"));
  if (const json* v = find(j, "check_maximum_principle"))
    num.options.check_maximum_principle =
        as_bool(*v, child(path, "check_maximum_principle"));
  if (const json* m = find(j, "mesh")) num.mesh = parse_mesh(*m, child(path, "mesh"));
  if (const json* v = find(j, "times")) {
    num.times = as_number_list(*v, child(path, "times"), true);
    for (std::size_t i = 1; i < num.times.size(); ++i) {
      if (num.times[i] <= num.times[i - 1])
        fail(elem(child(path, "times"), i), "expected strictly increasing times");
    }
  }
  if (const json* v = find(j, "epsilons")) {
    num.epsilons = as_number_list(*v, child(path, "epsilons"), true);
    for (std::size_t i = 1; i < num.epsilons.size(); ++i) {
      if (num.epsilons[i] >= num.epsilons[i - 1])
        fail(elem(child(path, "epsilons"), i),
             "expected strictly decreasing epsilons");
    }
  }
  if (const json* v = find(j, "ref_times"))
    num.ref_times = as_number_list(*v, child(path, "ref_times"), true);
  if (const json* k = find(j, "K")) {
    check_keys(*k, child(path, "K"), {"lo", "hi"});
    if (const json* v = find(*k, "lo"))
      num.k_lo = as_positive(*v, child(child(path, "K"), "lo"));
    if (const json* v = find(*k, "hi"))
      num.k_hi = as_positive(*v, child(child(path, "K"), "hi"));
    if (num.k_hi <= num.k_lo)
      fail(child(child(path, "K"), "hi"), "expected hi > lo");
  }
  if (const json* v = find(j, "envelope_tol"))
    num.envelope_tol = as_positive(*v, child(path, "envelope_tol"));
  if (const json* v = find(j, "tol")) num.tol = as_positive(*v, child(path, "tol"));
  if (const json* v = find(j, "tau")) num.tau = as_positive(*v, child(path, "tau"));
  if (const json* v = find(j, "surface_offset"))
    num.surface_offset = as_positive(*v, child(path, "surface_offset"));
  if (const json* v = find(j, "surface_samples")) {
    num.surface_samples = as_int(*v, child(path, "surface_samples"));
    if (num.surface_samples < 2)
      fail(child(path, "surface_samples"), "expected at least 2 samples");
  }
  if (const json* v = find(j, "moment_radii"))
    num.moment_radii = as_number_list(*v, child(path, "moment_radii"), true);
  if (const json* v = find(j, "band_limit")) {
    num.band_limit = as_positive(*v, child(path, "band_limit"));
    if (num.band_limit < 1.0)
      fail(child(path, "band_limit"), "expected a factor >= 1");
  }
  return num;
}

BarrierSpec parse_barrier(const json& j, const std::string& path) {
  check_keys(j, path, {"h0", "H0", "span"});
  BarrierSpec b;
  if (const json* v = find(j, "h0")) b.h0 = as_finite(*v, child(path, "h0"));
  if (const json* v = find(j, "H0")) b.H0 = as_finite(*v, child(path, "H0"));
  if (b.h0.has_value() != b.H0.has_value())
    fail(path, "h0 and H0 must be given together");
  if (const json* v = find(j, "span")) b.span = as_positive(*v, child(path, "span"));
  return b;
}

ManifoldRunSpec parse_manifold(const json& j, const std::string& path) {
  check_keys(j, path,
             {"model", "dimension", "r_inner", "r_outer", "setup",
              "boundary_value", "truncation_radius", "rho", "scale",
              "kernel_check", "euclid_check"});
  ManifoldRunSpec run;
  if (const json* m = find(j, "model")) {
    const std::string s = as_string(*m, child(path, "model"));
    if (s == "sphere")
      run.manifold.model = ManifoldModel::sphere;
    else if (s == "hyperbolic")
      run.manifold.model = ManifoldModel::hyperbolic;
    else
      fail(child(path, "model"), "expected sphere or hyperbolic");
  }
  if (const json* d = find(j, "dimension")) {
    run.manifold.dimension = as_int(*d, child(path, "dimension"));
    if (run.manifold.dimension < 2)
      fail(child(path, "dimension"), "expected dimension >= 2");
  }
  if (const json* v = find(j, "r_inner")) {
    run.domain.r_inner = as_finite(*v, child(path, "r_inner"));
    if (run.domain.r_inner < 0.0)
      fail(child(path, "r_inner"), "expected a nonnegative number");
  }
  const json* ro = find(j, "r_outer");
  if (!ro) fail(child(path, "r_outer"), "missing field");
  run.domain.r_outer = as_positive(*ro, child(path, "r_outer"));
  if (run.domain.r_outer <= run.domain.r_inner)
    fail(child(path, "r_outer"), "expected r_outer > r_inner");
  if (const json* s = find(j, "setup")) {
    const std::string v = as_string(*s, child(path, "setup"));
    if (v == "boundary_dirichlet")
      run.setup.kind = ManifoldSetup::Kind::boundary_dirichlet;
    else if (v == "cauchy_complement_indicator")
      run.setup.kind = ManifoldSetup::Kind::cauchy_complement_indicator;
    else
      fail(child(path, "setup"),
           "expected boundary_dirichlet or cauchy_complement_indicator");
  }
  if (const json* v = find(j, "boundary_value"))
    run.setup.boundary_value = as_positive(*v, child(path, "boundary_value"));
  if (const json* v = find(j, "truncation_radius")) {
    run.setup.truncation_radius = as_finite(*v, child(path, "truncation_radius"));
    if (run.setup.truncation_radius < 0.0)
      fail(child(path, "truncation_radius"), "expected a nonnegative number");
  }
  if (const json* v = find(j, "rho")) run.rho = as_positive(*v, child(path, "rho"));
  if (const json* v = find(j, "scale")) {
    run.scale = as_positive(*v, child(path, "scale"));
    if (run.scale > 1.0) fail(child(path, "scale"), "expected a scale in (0, 1]");
  }
  if (const json* v = find(j, "kernel_check"))
    run.kernel_check = as_bool(*v, child(path, "kernel_check"));
  if (const json* v = find(j, "euclid_check"))
    run.euclid_check = as_bool(*v, child(path, "euclid_check"));
  return run;
}

const char* domain_kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::interior:
      return "interior";
    case DomainKind::exterior:
      return "exterior";
    case DomainKind::annulus:
      return "annulus";
  }
  return "exterior";
}

ordered_json point_json(const Point& p, int dim) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[static_cast<std::size_t>(i)]);
  return a;
}

ordered_json domain_json(const DomainSpec& spec) {
  ordered_json j;
  j["kind"] = domain_kind_name(spec.kind);
  j["dimension"] = spec.dimension;
  ordered_json prims = ordered_json::array();
  for (const Primitive& prim : spec.primitives) {
    ordered_json p;
    if (const auto* b = std::get_if<Ball>(&prim)) {
      p["type"] = "ball";
      p["center"] = point_json(b->center, spec.dimension);
      p["radius"] = b->radius;
    } else if (const auto* e = std::get_if<Ellipse>(&prim)) {
      p["type"] = "ellipse";
      p["center"] = point_json(e->center, spec.dimension);
      p["semi_axes"] = point_json(e->semi_axes, spec.dimension);
    } else if (const auto* c = std::get_if<Capsule>(&prim)) {
      p["type"] = "capsule";
      p["p0"] = point_json(c->p0, spec.dimension);
      p["p1"] = point_json(c->p1, spec.dimension);
      p["radius"] = c->radius;
    }
    prims.push_back(std::move(p));
  }
  j["primitives"] = std::move(prims);
  if (spec.bbox.valid()) {
    ordered_json bb;
    bb["lo"] = point_json(spec.bbox.lo, spec.dimension);
    bb["hi"] = point_json(spec.bbox.hi, spec.dimension);
    j["bbox"] = std::move(bb);
  }
  return j;
}

ordered_json numerics_json(const NumericsSpec& num) {
  ordered_json j;
  j["representation"] =
      num.options.representation == Representation::primal ? "primal"
                                                           : "logarithmic";
  ordered_json st;
  st["policy"] = num.options.stepping.policy == TimeStepPolicy::geometric
                     ? "geometric"
                     : "proportional";
  st["dt_initial"] = num.options.stepping.dt_initial;
  st["growth"] = num.options.stepping.growth;
  st["dt_max"] = num.options.stepping.dt_max;
  st["rho"] = num.options.stepping.rho;
  st["dt_min"] = num.options.stepping.dt_min;
  j["stepping"] = std::move(st);
  j["newton_tol"] = num.options.newton_tol;
  j["max_newton_iter"] = num.options.max_newton_iter;
  j["max_halvings"] = num.options.max_halvings;
  j["log_seed_time"] = num.options.log_seed_time;
  j["log_seed_offset"] = num.options.log_seed_offset;
  j["check_maximum_principle"] = num.options.check_maximum_principle;
  ordered_json mesh;
  mesh["r_lo"] = num.mesh.r_lo;
  mesh["r_hi"] = num.mesh.r_hi;
  mesh["h_min"] = num.mesh.h_min;
  mesh["grade_ratio"] = num.mesh.grade_ratio;
  mesh["h_max"] = num.mesh.h_max;
  mesh["attractors"] = num.mesh.attractors;
  mesh["h"] = num.mesh.h;
  j["mesh"] = std::move(mesh);
  j["times"] = num.times;
  j["epsilons"] = num.epsilons;
  j["ref_times"] = num.ref_times;
  j["K"] = ordered_json{{"lo", num.k_lo}, {"hi", num.k_hi}};
  j["envelope_tol"] = num.envelope_tol;
  j["tol"] = num.tol;
  j["tau"] = num.tau;
  j["surface_offset"] = num.surface_offset;
  j["surface_samples"] = num.surface_samples;
  j["moment_radii"] = num.moment_radii;
  j["band_limit"] = num.band_limit;
  return j;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::solve:
      return "solve";
    case ExperimentKind::varadhan:
      return "varadhan";
    case ExperimentKind::pressure:
      return "pressure";
    case ExperimentKind::barrier:
      return "barrier";
    case ExperimentKind::symmetry:
      return "symmetry";
    case ExperimentKind::manifold:
      return "manifold";
    case ExperimentKind::acceptance:
      return "acceptance";
  }
  return "solve";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "solve") return ExperimentKind::solve;
  if (name == "varadhan") return ExperimentKind::varadhan;
  if (name == "pressure") return ExperimentKind::pressure;
  if (name == "barrier") return ExperimentKind::barrier;
  if (name == "symmetry") return ExperimentKind::symmetry;
  if (name == "manifold") return ExperimentKind::manifold;
  if (name == "acceptance") return ExperimentKind::acceptance;
  throw ConfigError("config: kind: unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config_text(const std::string& json_text,
                                   const std::string& origin) {
  const std::string prefix = origin.empty() ? "" : origin + ": ";
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + prefix + e.what());
  }
  try {
    check_keys(root, "",
               {"schema_version", "kind", "domain", "nonlinearity", "numerics",
                "barrier", "manifold", "out", "seed", "threads"});
    ExperimentConfig cfg;
    if (const json* v = find(root, "schema_version")) {
      const int version = as_int(*v, "schema_version");
      if (version != 1)
        fail("schema_version", "unsupported version " + std::to_string(version));
    }
    const json* kind = find(root, "kind");
    if (!kind) fail("kind", "missing field");
    cfg.kind = experiment_kind_from_string(as_string(*kind, "kind"));
    if (const json* d = find(root, "domain"))
      cfg.domain = parse_domain(*d, "domain");
    if (const json* n = find(root, "nonlinearity")) {
      cfg.nonlinearity = as_string(*n, "nonlinearity");
      try {
        nonlinearity_by_name(cfg.nonlinearity);
      } catch (const Error& e) {
        fail("nonlinearity", e.what());
      }
    }
    if (const json* n = find(root, "numerics"))
      cfg.numerics = parse_numerics(*n, "numerics");
    if (const json* b = find(root, "barrier"))
      cfg.barrier = parse_barrier(*b, "barrier");
    if (const json* m = find(root, "manifold"))
      cfg.manifold = parse_manifold(*m, "manifold");
    if (const json* o = find(root, "out")) cfg.out_dir = as_string(*o, "out");
    if (const json* s = find(root, "seed")) {
      if (!s->is_number_integer()) fail("seed", "expected a nonnegative integer");
      if (!s->is_number_unsigned() && s->get<std::int64_t>() < 0)
        fail("seed", "expected a nonnegative integer");
      cfg.seed = s->get<std::uint64_t>();
    }
    if (const json* t = find(root, "threads")) {
      cfg.threads = as_int(*t, "threads");
      if (cfg.threads < 1) fail("threads", "expected a positive integer");
    }
    return cfg;
  } catch (const ConfigError& e) {
    if (prefix.empty()) throw;
    throw ConfigError(prefix + e.what());
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string resolved_config_json(const ExperimentConfig& cfg, int indent) {
  ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = to_string(cfg.kind);
  if (cfg.domain) j["domain"] = domain_json(*cfg.domain);
  j["nonlinearity"] = cfg.nonlinearity;
  j["numerics"] = numerics_json(cfg.numerics);
  ordered_json barrier;
  if (cfg.barrier.h0) barrier["h0"] = *cfg.barrier.h0;
  if (cfg.barrier.H0) barrier["H0"] = *cfg.barrier.H0;
  barrier["span"] = cfg.barrier.span;
  j["barrier"] = std::move(barrier);
  if (cfg.manifold) {
    const ManifoldRunSpec& run = *cfg.manifold;
    ordered_json m;
    m["model"] =
        run.manifold.model == ManifoldModel::sphere ? "sphere" : "hyperbolic";
    m["dimension"] = run.manifold.dimension;
    m["r_inner"] = run.domain.r_inner;
    m["r_outer"] = run.domain.r_outer;
    m["setup"] = run.setup.kind == ManifoldSetup::Kind::boundary_dirichlet
                     ? "boundary_dirichlet"
                     : "cauchy_complement_indicator";
    m["boundary_value"] = run.setup.boundary_value;
    m["truncation_radius"] = run.setup.truncation_radius;
    m["rho"] = run.rho;
    m["scale"] = run.scale;
    m["kernel_check"] = run.kernel_check;
    m["euclid_check"] = run.euclid_check;
    j["manifold"] = std::move(m);
  }
  j["out"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  return j.dump(indent);
}

}  // namespace difflab
