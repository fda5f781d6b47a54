#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "chaoslab/chaos.hpp"
#include "chaoslab/discrete.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/exact.hpp"
#include "chaoslab/models.hpp"
#include "chaoslab/polynomial.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/valleys.hpp"
#include "chaoslab/variance.hpp"

#ifndef CHAOSLAB_VERSION
#define CHAOSLAB_VERSION "unknown"
#endif

namespace chaoslab::cli {

using nlohmann::json;

std::string version_string() { return CHAOSLAB_VERSION; }

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Reads one JSON object, records every value it hands out (defaults included)
// into `resolved`, and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& src, json& resolved, std::string pointer)
      : src_(src), resolved_(resolved), pointer_(std::move(pointer)) {
    if (!src_.is_object()) throw SchemaError(pointer_.empty() ? "/" : pointer_, "expected a JSON object");
    if (!resolved_.is_object()) resolved_ = json::object();
  }

  std::string ptr(const std::string& key) const { return pointer_ + "/" + escape_token(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw SchemaError(ptr(key), "field '" + key + "': " + message);
  }

  bool has(const std::string& key) const { return src_.contains(key); }

  const json& raw(const std::string& key) {
    touched_.insert(key);
    if (!src_.contains(key)) fail(key, "required field is missing");
    resolved_[key] = src_.at(key);
    return src_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback, double lo, double hi) {
    touched_.insert(key);
    double v;
    if (!src_.contains(key)) {
      if (!fallback) fail(key, "required field is missing");
      v = *fallback;
    } else {
      const auto& j = src_.at(key);
      if (!j.is_number()) fail(key, "expected a number");
      v = j.get<double>();
    }
    if (!std::isfinite(v) || v < lo || v > hi) {
      std::ostringstream os;
      os << "value " << v << " outside [" << lo << ", " << hi << "]";
      fail(key, os.str());
    }
    resolved_[key] = v;
    return v;
  }

  long long integer(const std::string& key, std::optional<long long> fallback, long long lo, long long hi) {
    touched_.insert(key);
    long long v;
    if (!src_.contains(key)) {
      if (!fallback) fail(key, "required field is missing");
      v = *fallback;
    } else {
      const auto& j = src_.at(key);
      if (!j.is_number_integer()) fail(key, "expected an integer");
      if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
        fail(key, "value too large");
      v = j.get<long long>();
    }
    if (v < lo || v > hi) fail(key, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "]");
    resolved_[key] = v;
    return v;
  }

  std::string choice(const std::string& key, std::optional<std::string> fallback,
                     const std::vector<std::string>& allowed) {
    touched_.insert(key);
    std::string v;
    if (!src_.contains(key)) {
      if (!fallback) fail(key, "required field is missing");
      v = *fallback;
    } else {
      if (!src_.at(key).is_string()) fail(key, "expected a string");
      v = src_.at(key).get<std::string>();
    }
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(key, "'" + v + "' is not one of: " + list);
    }
    resolved_[key] = v;
    return v;
  }

  bool flag(const std::string& key, bool fallback) {
    touched_.insert(key);
    bool v = fallback;
    if (src_.contains(key)) {
      if (!src_.at(key).is_boolean()) fail(key, "expected true or false");
      v = src_.at(key).get<bool>();
    }
    resolved_[key] = v;
    return v;
  }

  Beta beta(const std::string& key, std::optional<double> fallback) {
    touched_.insert(key);
    if (!src_.contains(key)) {
      if (!fallback) fail(key, "required field is missing");
      resolved_[key] = *fallback;
      return Beta::finite(*fallback);
    }
    const auto& j = src_.at(key);
    resolved_[key] = j;
    return parse_beta(j, key);
  }

  Beta parse_beta(const json& j, const std::string& key) const {
    if (j.is_string() && (j == "inf" || j == "infinity")) return Beta::infinity();
    if (!j.is_number()) fail(key, "expected a nonnegative number or \"inf\"");
    const double b = j.get<double>();
    if (!(b >= 0.0) || !std::isfinite(b)) fail(key, "beta must be finite and >= 0 (use \"inf\" for zero temperature)");
    return Beta::finite(b);
  }

  std::vector<double> numbers(const std::string& key, double lo, double hi) {
    const auto& j = raw(key);
    if (!j.is_array() || j.empty()) fail(key, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw SchemaError(ptr(key) + "/" + std::to_string(i), "field '" + key + "': expected a number");
      const double v = j[i].get<double>();
      if (!std::isfinite(v) || v < lo || v > hi)
        throw SchemaError(ptr(key) + "/" + std::to_string(i), "field '" + key + "': entry outside range");
      out.push_back(v);
    }
    return out;
  }

  Fields object(const std::string& key, bool required) {
    touched_.insert(key);
    static const json empty = json::object();
    if (!src_.contains(key)) {
      if (required) fail(key, "required field is missing");
      resolved_[key] = json::object();
      return Fields(empty, resolved_[key], ptr(key));
    }
    if (!src_.at(key).is_object()) fail(key, "expected a JSON object");
    resolved_[key] = json::object();
    return Fields(src_.at(key), resolved_[key], ptr(key));
  }

  void mark(const std::string& key) { touched_.insert(key); }

  void raw_default(const std::string& key, json value) {
    touched_.insert(key);
    resolved_[key] = std::move(value);
  }

  void override_value(const std::string& key, json value) { resolved_[key] = std::move(value); }

  void finish() const {
    for (const auto& [key, value] : src_.items())
      if (!touched_.count(key)) fail(key, "unknown field");
  }

 private:
  const json& src_;
  json& resolved_;
  std::string pointer_;
  std::set<std::string> touched_;
};

struct Context {
  SeedRecord seed;
  int threads = 1;
};

using Job = std::function<json(std::optional<std::string>& csv)>;

ModelSpec parse_model(Fields& f, const std::string& key) {
  const auto& j = f.raw(key);
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    f.fail(key, std::string("malformed model: ") + e.what());
  } catch (const std::exception& e) {
    f.fail(key, e.what());
  }
}

Graph parse_graph(Fields& f, const std::string& key) {
  const auto& j = f.raw(key);
  try {
    return graph_spec_from_json(j);
  } catch (const json::exception& e) {
    f.fail(key, std::string("malformed graph: ") + e.what());
  } catch (const std::exception& e) {
    f.fail(key, e.what());
  }
}

std::vector<double> parse_grid(Fields& f, const std::string& key, std::vector<double> fallback) {
  std::vector<double> grid;
  if (!f.has(key)) {
    f.mark(key);
    grid = std::move(fallback);
  } else {
    const auto& j = f.raw(key);
    if (j.is_object()) {
      json sub;
      Fields g(j, sub, f.ptr(key));
      const double t_max = g.number("t_max", 10.0, 1e-9, 1e6);
      const auto points = g.integer("points", 40, 2, 100000);
      g.finish();
      grid = default_time_grid(t_max, static_cast<int>(points));
    } else {
      grid = f.numbers(key, 0.0, std::numeric_limits<double>::max());
    }
  }
  try {
    validate_time_grid(grid);
  } catch (const std::exception& e) {
    f.fail(key, e.what());
  }
  return grid;
}

void check_exact_cap(Fields& f, const ModelSpec& model, int cap) {
  if (model.n_sites() > cap)
    f.fail("model", "exact enumeration is capped at N = " + std::to_string(cap) + ", got N = " +
                        std::to_string(model.n_sites()));
}

std::string csv_of(const ChaosCurve& curve, const std::vector<std::pair<std::string, std::vector<double>>>& extra = {}) {
  std::ostringstream os;
  write_curve_csv(os, curve, extra);
  return os.str();
}

constexpr long long kBig = 1'000'000'000'000LL;

Job parse_chaos_curve(Fields& f, const Context& ctx) {
  const auto model = parse_model(f, "model");
  const Beta beta = f.beta("beta", 1.0);
  ChaosOptions o;
  o.observable = parse_observable(
      f.choice("observable", "overlap_power", {"overlap_power", "R2k", "rho", "kernel", "bond_overlap", "Q", "identity"}));
  o.k = static_cast<int>(f.integer("k", 1, 1, 64));
  o.n_disorder = static_cast<std::size_t>(f.integer("n_disorder", 100, 2, kBig));
  o.engine = parse_engine(f.choice("engine", "exact", {"exact", "mc", "quadrature"}));
  o.mc_sweeps = static_cast<std::size_t>(f.integer("mc_sweeps", 4000, 1, kBig));
  o.quadrature_nodes = static_cast<int>(f.integer("quadrature_nodes", 64, 2, 512));
  o.seed = ctx.seed;
  o.threads = ctx.threads;
  const auto grid = parse_grid(f, "t_grid", default_time_grid());
  const double sigmas = f.number("sigmas", 3.0, 0.0, 100.0);
  std::vector<double> s_values;
  if (f.has("interpolation_s")) s_values = f.numbers("interpolation_s", 1e-12, 1e6);
  const bool want_csv = f.flag("csv", false);

  if (o.observable == ChaosObservable::bond_overlap && !model.is_ea())
    f.fail("observable", "bond_overlap needs an E-A model");
  if (o.engine == Engine::exact) check_exact_cap(f, model, kMaxExactSites);
  if (o.engine == Engine::mc && beta.is_infinite()) f.fail("beta", "the mc engine needs a finite beta");
  if (o.engine == Engine::quadrature && model.coupling_count() != 1)
    f.fail("engine", "quadrature chaos curves support a single coupling only");
  if (!s_values.empty()) {
    if (o.observable != ChaosObservable::overlap_power) f.fail("interpolation_s", "needs observable overlap_power");
    if (model.is_ea()) f.fail("interpolation_s", "the interpolation bound needs rho >= 0; E-A is not supported");
    if (beta.is_infinite()) f.fail("interpolation_s", "needs a finite beta");
    if (grid.front() != 0.0) f.fail("interpolation_s", "needs t_grid to start at 0");
  }

  return [=](std::optional<std::string>& csv) {
    const auto curve = chaos_curve(model, beta, grid, o);
    const auto report = check_complete_monotonicity(curve, sigmas);
    json result{{"curve", to_json(curve)}, {"monotonicity", to_json(report)}};
    std::vector<std::pair<std::string, std::vector<double>>> extra;
    if (!s_values.empty()) {
      json rows = json::array();
      std::vector<double> column;
      for (double t : grid) {
        std::vector<double> usable;
        for (double s : s_values)
          if (s >= t && s > 0.0) usable.push_back(s);
        if (t > 0.0 && usable.empty()) {
          rows.push_back({{"t", t}, {"bound", nullptr}, {"best_s", nullptr}});
          column.push_back(std::numeric_limits<double>::quiet_NaN());
          continue;
        }
        const auto b = chaos_from_interpolation(model, beta, t, usable.empty() ? s_values : usable, o.k,
                                                curve.phi_hat.front());
        rows.push_back({{"t", t}, {"bound", b.bound}, {"best_s", b.best_s}});
        column.push_back(b.bound);
      }
      result["interpolation"] = rows;
      extra.emplace_back("interpolation_bound", column);
    }
    if (want_csv) csv = csv_of(curve, extra);
    return result;
  };
}

Job parse_variance(Fields& f, const Context& ctx) {
  const Beta beta = f.beta("beta", 1.0);
  if (!beta.is_infinite() && beta.value() == 0.0) f.fail("beta", "F = (1/beta) log Z needs beta > 0");
  VarianceOptions vo;
  vo.n_disorder = static_cast<std::size_t>(f.integer("n_disorder", 1000, 2, kBig));
  vo.engine = parse_engine(f.choice("engine", "exact", {"exact", "quadrature"}));
  vo.quadrature_nodes = static_cast<int>(f.integer("quadrature_nodes", 64, 2, 512));
  vo.seed = ctx.seed.child({1});
  vo.threads = ctx.threads;
  const bool want_csv = f.flag("csv", false);

  if (f.has("sweep_n")) {
    const auto ns = f.numbers("sweep_n", 2, kMaxExactSites);
    const double c = f.number("c", 1.0, 1e-12, 1e12);
    if (vo.engine != Engine::exact) f.fail("engine", "the N sweep uses the exact engine");
    if (beta.is_infinite()) f.fail("beta", "the superconcentration sweep needs a finite beta");
    std::vector<int> sizes;
    for (double n : ns) {
      if (n != std::floor(n)) f.fail("sweep_n", "sizes must be integers");
      sizes.push_back(static_cast<int>(n));
    }
    return [=](std::optional<std::string>&) {
      json rows = json::array();
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        auto opts = vo;
        opts.seed = vo.seed.child({static_cast<std::uint64_t>(sizes[i])});
        const auto est = variance_direct(ModelSpec::sk(sizes[i]), beta, opts);
        const double n = sizes[i];
        rows.push_back({{"n", sizes[i]},
                        {"variance", to_json(est)},
                        {"scaled", est.variance * std::log(n) / n},
                        {"scaled_std_error", est.std_error * std::log(n) / n},
                        {"bound_shape", superconcentration_bound(n, beta.value(), c)}});
      }
      return json{{"model", "sk"}, {"sweep", rows}, {"c", c}};
    };
  }

  const auto model = parse_model(f, "model");
  const auto grid = parse_grid(f, "t_grid", default_time_grid());
  Fields cf = f.object("chaos", false);
  ChaosOptions co;
  co.observable = ChaosObservable::kernel;
  co.engine = parse_engine(cf.choice("engine", vo.engine == Engine::quadrature ? "quadrature" : "exact",
                                     {"exact", "mc", "quadrature"}));
  co.n_disorder = static_cast<std::size_t>(cf.integer("n_disorder", 500, 2, kBig));
  co.mc_sweeps = static_cast<std::size_t>(cf.integer("mc_sweeps", 4000, 1, kBig));
  co.quadrature_nodes = static_cast<int>(cf.integer("quadrature_nodes", 64, 2, 512));
  co.seed = ctx.seed.child({2});
  co.threads = ctx.threads;
  cf.finish();
  const bool no_chaos = f.flag("no_chaos", false);

  if (vo.engine == Engine::quadrature && model.coupling_count() > 3)
    f.fail("engine", "quadrature variance supports at most 3 couplings");
  if (co.engine == Engine::quadrature && model.coupling_count() != 1)
    throw SchemaError(f.ptr("chaos") + "/engine", "field 'engine': quadrature chaos curves support a single coupling only");
  if (co.engine == Engine::mc && beta.is_infinite())
    throw SchemaError(f.ptr("chaos") + "/engine", "field 'engine': the mc engine needs a finite beta");
  if (vo.engine == Engine::exact || co.engine == Engine::exact) check_exact_cap(f, model, kMaxExactSites);
  if (grid.front() != 0.0) f.fail("t_grid", "the variance integral needs a grid starting at t = 0");
  if (no_chaos && !model.is_ea()) f.fail("no_chaos", "the no-chaos floor is stated for E-A models");

  return [=](std::optional<std::string>& csv) {
    const auto rep = variance_report(model, beta, vo, co, grid);
    json result = to_json(rep);
    if (no_chaos) result["no_chaos"] = to_json(no_chaos_experiment(model, beta, grid, co.n_disorder, ctx.seed.child({3}), ctx.threads));
    if (want_csv) csv = csv_of(rep.curve);
    return result;
  };
}

Job parse_plancherel(Fields& f, const Context& ctx) {
  if (f.has("polynomial")) {
    const auto& j = f.raw("polynomial");
    Polynomial p(1);
    try {
      p = polynomial_from_json(j);
    } catch (const json::exception& e) {
      f.fail("polynomial", std::string("malformed polynomial: ") + e.what());
    } catch (const std::exception& e) {
      f.fail("polynomial", e.what());
    }
    return [p](std::optional<std::string>&) {
      const auto hv = hermite_variance(p);
      const auto lb = variance_lower_bound_general(p);
      return json{{"polynomial", to_json(p)},
                  {"hermite_variance", hv.variance},
                  {"by_order", hv.by_order},
                  {"oracle_variance", gaussian_variance_oracle(p)},
                  {"lower_bound", {{"coordinatewise", lb.coordinatewise}, {"aggregate", lb.aggregate}}}};
    };
  }
  Fields r = f.object("random", false);
  const auto count = r.integer("count", 200, 1, 1'000'000);
  const auto n_max = r.integer("n_max", 4, 1, 8);
  const auto deg_max = r.integer("deg_max", 6, 0, 12);
  const auto terms_max = r.integer("terms_max", 8, 1, 64);
  r.finish();
  return [=](std::optional<std::string>&) {
    Rng rng(ctx.seed);
    double max_abs = 0.0, max_rel = 0.0, max_excess = -std::numeric_limits<double>::infinity();
    json rows = json::array();
    for (long long c = 0; c < count; ++c) {
      const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max)));
      const int deg = static_cast<int>(rng.below(static_cast<std::uint64_t>(deg_max + 1)));
      const int terms = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(terms_max)));
      const auto p = random_polynomial(n, deg, terms, rng);
      const double hv = hermite_variance(p).variance;
      const double oracle = gaussian_variance_oracle(p);
      const auto lb = variance_lower_bound_general(p);
      max_abs = std::max(max_abs, std::abs(hv - oracle));
      max_rel = std::max(max_rel, std::abs(hv - oracle) / std::max(1.0, std::abs(oracle)));
      max_excess = std::max({max_excess, lb.coordinatewise - oracle, lb.aggregate - oracle});
      rows.push_back({{"n", n}, {"degree", p.degree()}, {"hermite", hv}, {"oracle", oracle},
                      {"lower_bound", lb.coordinatewise}, {"lower_bound_aggregate", lb.aggregate}});
    }
    return json{{"count", count},
                {"max_abs_diff", max_abs},
                {"max_rel_diff", max_rel},
                {"max_lower_bound_excess", max_excess},
                {"cases", rows}};
  };
}

Job parse_discrete(Fields& f, const Context& ctx) {
  const auto kind = f.choice("function", "linear", {"linear", "polynomial", "sk"});
  const auto n_samples = static_cast<std::size_t>(f.integer("n_samples", 1000, 2, kBig));
  if (kind == "sk") {
    const auto n_sites = static_cast<int>(f.integer("n_sites", std::nullopt, 2, kMaxPairSites));
    const Beta beta = f.beta("beta", 1.0);
    if (beta.is_infinite()) f.fail("beta", "needs a finite beta");
    const long long n = static_cast<long long>(n_sites) * n_sites;
    long long k;
    if (f.has("p")) {
      if (f.has("k")) f.fail("p", "give either k or p, not both");
      const double p = f.number("p", std::nullopt, 0.0, 1.0);
      k = std::llround(p * static_cast<double>(n));
    } else {
      k = f.integer("k", std::nullopt, 0, kBig);
      if (k > n) f.fail("k", "k = " + std::to_string(k) + " exceeds the number of couplings n = " + std::to_string(n));
    }
    return [=](std::optional<std::string>&) {
      return to_json(discrete_perturb_sk(n_sites, beta, static_cast<std::size_t>(k), n_samples, ctx.seed, ctx.threads));
    };
  }
  Polynomial p(1);
  if (kind == "linear") {
    const auto n = static_cast<int>(f.integer("n", std::nullopt, 1, 100000));
    p = Polynomial(n);
    for (int i = 0; i < n; ++i) p = p + Polynomial::variable(n, i) * (1.0 / std::sqrt(static_cast<double>(n)));
  } else {
    const auto& j = f.raw("polynomial");
    try {
      p = polynomial_from_json(j);
    } catch (const json::exception& e) {
      f.fail("polynomial", std::string("malformed polynomial: ") + e.what());
    } catch (const std::exception& e) {
      f.fail("polynomial", e.what());
    }
  }
  const auto k = f.integer("k", std::nullopt, 0, kBig);
  if (k > p.n_vars())
    f.fail("k", "k = " + std::to_string(k) + " exceeds n = " + std::to_string(p.n_vars()));
  const bool with_tk = f.flag("with_tk", false);
  return [=](std::optional<std::string>&) {
    return to_json(discrete_perturb_polynomial(p, static_cast<std::size_t>(k), n_samples, ctx.seed, ctx.threads, with_tk));
  };
}

Job parse_quenched(Fields& f, const Context& ctx) {
  const auto graph = parse_graph(f, "graph");
  const Beta beta = f.beta("beta", 1.0);
  const double t = f.number("t", std::nullopt, 0.0, 1e6);
  if (t <= 0.0) f.fail("t", "t must be > 0 (the bound diverges at t = 0)");
  QuenchedOptions o;
  o.n_disorder = static_cast<std::size_t>(f.integer("n_disorder", 1000, 2, kBig));
  o.engine = parse_engine(f.choice("engine", "exact", {"exact", "mc"}));
  o.mc_sweeps = static_cast<std::size_t>(f.integer("mc_sweeps", 4000, 1, kBig));
  o.seed = ctx.seed;
  o.threads = ctx.threads;
  if (o.engine == Engine::exact && graph.n_vertices() > kMaxExactSites) f.fail("graph", "too many vertices for exact enumeration");
  if (o.engine == Engine::mc && beta.is_infinite()) f.fail("beta", "the mc engine needs a finite beta");
  return [=](std::optional<std::string>&) { return to_json(quenched_chaos_statistic(graph, beta, t, o)); };
}

Job parse_valleys(Fields& f, const Context& ctx) {
  ModelSpec model = ModelSpec::sk(18);
  if (f.has("model")) model = parse_model(f, "model");
  else f.raw_default("model", to_json(model));
  check_exact_cap(f, model, kMaxExactSites);
  const auto schedule = f.choice("schedule", "custom", {"custom", "paper"});
  ValleyParams params = schedule == "paper" ? paper_schedule(model.n_sites()) : ValleyParams{};
  if (f.has("params")) {
    const auto& j = f.raw("params");
    if (!j.is_object()) f.fail("params", "expected a JSON object");
    for (const auto& [key, value] : j.items())
      if (key != "r" && key != "epsilon" && key != "delta" && key != "beta" && key != "t")
        throw SchemaError(f.ptr("params") + "/" + escape_token(key), "field '" + key + "': unknown field");
    try {
      params = valley_params_from_json(j, params);
    } catch (const json::exception& e) {
      f.fail("params", std::string("malformed parameters: ") + e.what());
    } catch (const std::exception& e) {
      f.fail("params", e.what());
    }
  }
  try {
    validate(params);
  } catch (const std::exception& e) {
    f.fail("params", e.what());
  }
  f.override_value("params", to_json(params));
  const auto n_draws = static_cast<std::size_t>(f.integer("n_draws", 20, 1, 1'000'000));
  std::optional<double> alpha;
  if (f.has("alpha")) {
    alpha = f.number("alpha", std::nullopt, 0.0, 1.0);
    if (*alpha <= 0.0) f.fail("alpha", "alpha must lie in (0, 1]");
  }
  return [=](std::optional<std::string>&) {
    json draws = json::array();
    std::size_t passed = 0, orthogonal = 0, energetic = 0;
    double ratio_sum = 0.0;
    std::size_t ratio_count = 0;
    for (std::size_t d = 0; d < n_draws; ++d) {
      const auto g = fresh_disorder(model.coupling_count(), ctx.seed.child({d, 0}));
      const auto seed = ctx.seed.child({d, 1});
      const auto rep = alpha ? find_level_valleys(model, g, *alpha, params, seed, ctx.threads)
                             : find_valleys(model, g, params, seed, ctx.threads);
      passed += rep.pass;
      orthogonal += rep.orthogonal;
      energetic += rep.energetic;
      for (double x : rep.field_ratio) {
        ratio_sum += x;
        ++ratio_count;
      }
      auto j = to_json(rep);
      j["draw"] = d;
      draws.push_back(std::move(j));
    }
    const double nd = static_cast<double>(n_draws);
    return json{{"params", to_json(params)},
                {"model", to_json(model)},
                {"n_draws", n_draws},
                {"pass_rate", passed / nd},
                {"orthogonal_rate", orthogonal / nd},
                {"energetic_rate", energetic / nd},
                {"mean_field_ratio", ratio_count ? ratio_sum / ratio_count : 0.0},
                {"draws", draws}};
  };
}

Job parse_rem(Fields& f, const Context& ctx) {
  const auto n = static_cast<int>(f.integer("n", std::nullopt, 1, 24));
  const Beta beta = f.beta("beta", 1.0);
  if (beta.is_infinite()) f.fail("beta", "needs a finite beta");
  const auto grid = parse_grid(f, "t_grid", default_time_grid());
  const auto n_disorder = static_cast<std::size_t>(f.integer("n_disorder", 1000, 2, kBig));
  const double sigmas = f.number("sigmas", 3.0, 0.0, 100.0);
  const bool want_csv = f.flag("csv", false);
  return [=](std::optional<std::string>& csv) {
    const auto curve = rem_overlap_curve(n, beta, grid, n_disorder, ctx.seed, ctx.threads);
    if (want_csv) csv = csv_of(curve);
    return json{{"curve", to_json(curve)},
                {"monotonicity", to_json(check_complete_monotonicity(curve, sigmas))},
                {"uniform", std::ldexp(1.0, -n)}};
  };
}

Job parse_ea_bounds(Fields& f, const Context& ctx) {
  const auto graph = parse_graph(f, "graph");
  if (graph.n_vertices() > kMaxExactSites) f.fail("graph", "too many vertices for exact enumeration");
  std::vector<Beta> betas;
  if (f.has("betas")) {
    const auto& j = f.raw("betas");
    if (!j.is_array() || j.empty()) f.fail("betas", "expected a nonempty array");
    for (std::size_t i = 0; i < j.size(); ++i) {
      try {
        const Beta b = f.parse_beta(j[i], "betas");
        if (!b.is_infinite() && b.value() == 0.0) f.fail("betas", "F = (1/beta) log Z needs beta > 0");
        betas.push_back(b);
      } catch (const SchemaError& e) {
        throw SchemaError(f.ptr("betas") + "/" + std::to_string(i), e.what());
      }
    }
  } else {
    betas = {Beta::finite(1.0), Beta::infinity()};
    f.raw_default("betas", json::array({1.0, "inf"}));
  }
  const auto n_disorder = static_cast<std::size_t>(f.integer("n_disorder", 20000, 2, kBig));
  const double sigmas = f.number("sigmas", 3.0, 0.0, 100.0);
  return [=](std::optional<std::string>&) {
    const auto model = ModelSpec::edwards_anderson(graph);
    json rows = json::array();
    bool all = true;
    for (std::size_t i = 0; i < betas.size(); ++i) {
      VarianceOptions o;
      o.n_disorder = n_disorder;
      o.seed = ctx.seed.child({i});
      o.threads = ctx.threads;
      const auto est = variance_direct(model, betas[i], o);
      const double bound = ea_variance_lower_bound(graph, betas[i]);
      const bool pass = est.variance + sigmas * est.std_error >= bound;
      all = all && pass;
      rows.push_back({{"beta", to_json(betas[i])}, {"bound", bound}, {"variance", to_json(est)}, {"pass", pass}});
    }
    return json{{"edges", graph.n_edges()}, {"max_degree", graph.max_degree()}, {"rows", rows}, {"pass", all}};
  };
}

struct AssertSpec {
  std::string path;
  std::string op;
  json value;
  std::optional<std::string> ref;
  double tol = 0.0;
};

std::vector<AssertSpec> parse_asserts(const json& config, json& resolved) {
  std::vector<AssertSpec> out;
  if (!config.contains("assert")) return out;
  const auto& arr = config.at("assert");
  if (!arr.is_array()) throw SchemaError("/assert", "field 'assert': expected an array");
  resolved["assert"] = arr;
  static const std::set<std::string> ops{"le", "ge", "lt", "gt", "eq", "near", "true", "false"};
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string base = "/assert/" + std::to_string(i);
    const auto& a = arr[i];
    if (!a.is_object()) throw SchemaError(base, "field 'assert': entries must be objects");
    for (const auto& [key, v] : a.items())
      if (key != "path" && key != "op" && key != "value" && key != "ref" && key != "tol")
        throw SchemaError(base + "/" + escape_token(key), "field '" + key + "': unknown field");
    AssertSpec s;
    if (!a.contains("path") || !a["path"].is_string() || a["path"].get<std::string>().rfind("/", 0) != 0)
      throw SchemaError(base + "/path", "field 'path': expected a JSON pointer such as \"/result/pass\"");
    s.path = a["path"];
    if (!a.contains("op") || !a["op"].is_string() || !ops.count(a["op"].get<std::string>()))
      throw SchemaError(base + "/op", "field 'op': expected one of le, ge, lt, gt, eq, near, true, false");
    s.op = a["op"];
    if (a.contains("value")) s.value = a["value"];
    if (a.contains("ref")) {
      if (!a["ref"].is_string()) throw SchemaError(base + "/ref", "field 'ref': expected a JSON pointer");
      s.ref = a["ref"].get<std::string>();
    }
    if (a.contains("tol")) {
      if (!a["tol"].is_number() || a["tol"].get<double>() < 0.0)
        throw SchemaError(base + "/tol", "field 'tol': expected a nonnegative number");
      s.tol = a["tol"];
    }
    const bool needs_operand = s.op != "true" && s.op != "false";
    if (needs_operand && s.value.is_null() && !s.ref)
      throw SchemaError(base, "field 'assert': op '" + s.op + "' needs a value or a ref");
    if (s.op == "near" && !a.contains("tol")) throw SchemaError(base + "/op", "field 'op': near needs a tol");
    try {
      (void)json::json_pointer(s.path);
      if (s.ref) (void)json::json_pointer(*s.ref);
    } catch (const json::exception& e) {
      throw SchemaError(base + "/path", std::string("field 'path': ") + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<json> lookup(const json& record, const std::string& pointer) {
  const json::json_pointer p(pointer);
  if (!record.contains(p)) return std::nullopt;
  return record.at(p);
}

AssertResult evaluate(const AssertSpec& s, const json& record) {
  AssertResult r{s.path, s.op, s.ref ? json(*s.ref) : s.value, nullptr, false};
  const auto actual = lookup(record, s.path);
  if (!actual) return r;
  r.actual = *actual;
  if (s.op == "true" || s.op == "false") {
    r.pass = actual->is_boolean() && actual->get<bool>() == (s.op == "true");
    return r;
  }
  json expected = s.value;
  if (s.ref) {
    const auto e = lookup(record, *s.ref);
    if (!e) return r;
    expected = *e;
    r.expected = expected;
  }
  if (s.op == "eq" && !(actual->is_number() && expected.is_number())) {
    r.pass = *actual == expected;
    return r;
  }
  if (!actual->is_number() || !expected.is_number()) return r;
  const double a = actual->get<double>(), e = expected.get<double>();
  if (s.op == "le") r.pass = a <= e + s.tol;
  else if (s.op == "ge") r.pass = a >= e - s.tol;
  else if (s.op == "lt") r.pass = a < e;
  else if (s.op == "gt") r.pass = a > e;
  else if (s.op == "eq") r.pass = a == e;
  else if (s.op == "near") r.pass = std::abs(a - e) <= s.tol;
  return r;
}

}  // namespace

RunOutcome run_experiment(const json& config, const RunOptions& options) {
  if (!config.is_object()) throw SchemaError("/", "config must be a JSON object");
  json resolved = json::object();
  Fields top(config, resolved, "");
  const auto kind = top.choice("experiment", std::nullopt,
                               {"chaos-curve", "variance", "plancherel", "discrete", "quenched", "valleys", "rem", "ea-bounds"});
  const auto name = top.has("name") ? top.raw("name") : json(kind);
  if (!name.is_string() || name.get<std::string>().empty() ||
      name.get<std::string>().find_first_of("/\\") != std::string::npos)
    top.fail("name", "expected a nonempty file-name-safe string");
  resolved["name"] = name;

  Context ctx;
  std::uint64_t master = 0;
  if (options.seed) {
    top.mark("seed");
    master = *options.seed;
  } else {
    master = static_cast<std::uint64_t>(top.integer("seed", 1, 0, std::numeric_limits<long long>::max()));
  }
  resolved["seed"] = master;
  ctx.seed = SeedRecord::from_master(master);
  if (options.threads) {
    top.mark("threads");
    ctx.threads = *options.threads;
    if (ctx.threads < 1) throw SchemaError("/threads", "field 'threads': --threads must be >= 1");
  } else {
    ctx.threads = static_cast<int>(top.integer("threads", 1, 1, 1024));
  }
  resolved["threads"] = ctx.threads;
  top.mark("assert");

  Job job;
  if (kind == "chaos-curve") job = parse_chaos_curve(top, ctx);
  else if (kind == "variance") job = parse_variance(top, ctx);
  else if (kind == "plancherel") job = parse_plancherel(top, ctx);
  else if (kind == "discrete") job = parse_discrete(top, ctx);
  else if (kind == "quenched") job = parse_quenched(top, ctx);
  else if (kind == "valleys") job = parse_valleys(top, ctx);
  else if (kind == "rem") job = parse_rem(top, ctx);
  else job = parse_ea_bounds(top, ctx);
  top.finish();
  const auto asserts = parse_asserts(config, resolved);

  RunOutcome out;
  out.name = name.get<std::string>();
  json result = job(out.csv);
  out.record = json{{"chaoslab_version", version_string()},
                    {"experiment", kind},
                    {"config", resolved},
                    {"seed", {{"master", master}, {"stream", ctx.seed.stream}, {"gaussian", std::string(kGaussianMethod)}}},
                    {"result", std::move(result)}};
  json checks = json::array();
  for (const auto& s : asserts) {
    auto r = evaluate(s, out.record);
    out.asserts_ok = out.asserts_ok && r.pass;
    checks.push_back({{"path", r.path}, {"op", r.op}, {"expected", r.expected}, {"actual", r.actual}, {"pass", r.pass}});
    out.asserts.push_back(std::move(r));
  }
  out.record["asserts"] = checks;
  out.record["status"] = out.asserts_ok ? "pass" : "fail";
  return out;
}

std::vector<std::pair<std::string, std::string>> presets() {
  return {
      {"paper-schedule", "SK N=18 valleys: beta = e^sqrt(log N), t = (log N)^(-1/3), r=3, delta=0.3, epsilon=0.2, 20 draws"},
      {"c8-ea", "E-A variance lower bound 9/64 on the 8-cycle at beta = 1 and beta = inf, 2e4 exact draws"},
      {"rem-curve", "REM N=12, beta=3: E<1{s1=s2}> at t in {0, 0.2, 1, 50}, 2e5 draws"},
      {"sk-superconcentration", "SK var F at beta=1 for N in {8, 12, 16, 20} with var log N / N"},
  };
}

json preset_config(const std::string& name) {
  if (name == "paper-schedule")
    return json{{"experiment", "valleys"},
                {"name", "paper-schedule"},
                {"model", {{"kind", "sk"}, {"n", 18}}},
                {"schedule", "paper"},
                {"params", {{"r", 3}, {"delta", 0.3}, {"epsilon", 0.2}}},
                {"n_draws", 20},
                {"seed", 1}};
  if (name == "c8-ea")
    return json{{"experiment", "ea-bounds"},
                {"name", "c8-ea"},
                {"graph", {{"type", "cycle"}, {"n", 8}}},
                {"betas", json::array({1.0, "inf"})},
                {"n_disorder", 20000},
                {"seed", 1},
                {"assert", json::array({{{"path", "/result/pass"}, {"op", "true"}}})}};
  if (name == "rem-curve")
    return json{{"experiment", "rem"},
                {"name", "rem-curve"},
                {"n", 12},
                {"beta", 3.0},
                {"t_grid", json::array({0.0, 0.2, 1.0, 50.0})},
                {"n_disorder", 200000},
                {"seed", 1},
                {"csv", true},
                {"assert", json::array({{{"path", "/result/monotonicity/ok"}, {"op", "true"}}})}};
  if (name == "sk-superconcentration")
    return json{{"experiment", "variance"},
                {"name", "sk-superconcentration"},
                {"beta", 1.0},
                {"sweep_n", json::array({8, 12, 16, 20})},
                {"n_disorder", 200},
                {"seed", 1}};
  throw SchemaError("/", "unknown preset '" + name + "'");
}

int locate_line(const std::string& text, const std::string& pointer) {
  std::vector<std::string> keys;
  std::vector<int> depths;
  int depth_needed = 1;
  std::string rest = pointer;
  while (!rest.empty() && rest.front() == '/') {
    rest.erase(0, 1);
    const auto slash = rest.find('/');
    const std::string token = rest.substr(0, slash);
    rest = slash == std::string::npos ? "" : rest.substr(slash);
    std::string key;
    for (std::size_t i = 0; i < token.size(); ++i) {
      if (token[i] == '~' && i + 1 < token.size()) key += token[++i] == '1' ? '/' : '~';
      else key += token[i];
    }
    if (!key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) { return std::isdigit(c); })) {
      ++depth_needed;
      continue;
    }
    keys.push_back(key);
    depths.push_back(depth_needed++);
  }

  // Walk the text once, matching each key only at its own nesting depth.
  std::size_t found = 0;
  std::size_t next = 0;
  int depth = 0;
  for (std::size_t i = 0; i < text.size() && next < keys.size(); ++i) {
    const char c = text[i];
    if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      --depth;
      if (next > 0 && depth < depths[next - 1]) break;
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string token;
      while (j < text.size() && text[j] != '"') {
        if (text[j] == '\\' && j + 1 < text.size()) ++j;
        token += text[j++];
      }
      std::size_t after = j + 1;
      while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
      if (depth == depths[next] && token == keys[next] && after < text.size() && text[after] == ':') {
        found = i;
        ++next;
      }
      i = j;
    }
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
}

}  // namespace chaoslab::cli
