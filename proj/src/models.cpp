#include "chaoslab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kMaxPSpinCouplings = std::size_t{1} << 26;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > kMaxPSpinCouplings) return out;
    out *= base;
  }
  return out;
}

double p_spin_weight(int n, int p, double c) {
  return std::sqrt(c) * std::pow(static_cast<double>(n), 0.5 * (1 - p));
}

}  // namespace

ModelSpec ModelSpec::sk(int n) {
  if (n < 1) throw invalid_parameter("SK model needs N >= 1");
  return ModelSpec(SkModel{n});
}

ModelSpec ModelSpec::mixed_p_spin(int n, std::map<int, double> coefficients) {
  if (n < 1) throw invalid_parameter("p-spin model needs N >= 1");
  if (coefficients.empty()) throw invalid_parameter("p-spin model needs at least one coefficient");
  std::size_t total = 0;
  for (auto [p, c] : coefficients) {
    if (p < 1) throw invalid_parameter("p-spin order must be >= 1");
    if (!(c >= 0.0) || !std::isfinite(c)) throw invalid_parameter("p-spin coefficients must be finite and >= 0");
    total += ipow(static_cast<std::size_t>(n), p);
    if (total > kMaxPSpinCouplings) throw resource_error("p-spin tensor too large");
  }
  ModelSpec spec(MixedPSpinModel{n, std::move(coefficients)});
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1.0 + i / 1000.0;
    if (spec.xi(x) < -1e-12) throw invalid_parameter("p-spin kernel xi must be nonnegative on [-1, 1]");
  }
  return spec;
}

ModelSpec ModelSpec::edwards_anderson(Graph graph) {
  if (graph.n_edges() == 0) throw invalid_parameter("E-A model needs at least one edge");
  return ModelSpec(EdwardsAndersonModel{std::move(graph)});
}

ModelSpec ModelSpec::rem(int n) {
  if (n < 1) throw invalid_parameter("REM needs N >= 1");
  if (n > kMaxRemSites) throw resource_error("REM stores 2^N energies; N is capped at 24");
  return ModelSpec(RemModel{n});
}

int ModelSpec::n_sites() const {
  return std::visit(overloaded{[](const SkModel& m) { return m.n; }, [](const MixedPSpinModel& m) { return m.n; },
                               [](const EdwardsAndersonModel& m) { return m.graph.n_vertices(); },
                               [](const RemModel& m) { return m.n; }},
                    variant_);
}

std::size_t ModelSpec::coupling_count() const {
  return std::visit(overloaded{[](const SkModel& m) { return static_cast<std::size_t>(m.n) * m.n; },
                               [](const MixedPSpinModel& m) {
                                 std::size_t total = 0;
                                 for (const auto& kv : m.coefficients) total += ipow(static_cast<std::size_t>(m.n), kv.first);
                                 return total;
                               },
                               [](const EdwardsAndersonModel& m) { return m.graph.n_edges(); },
                               [](const RemModel& m) { return std::size_t{1} << m.n; }},
                    variant_);
}

std::string ModelSpec::name() const {
  return std::visit(overloaded{[](const SkModel&) { return std::string("sk"); },
                               [](const MixedPSpinModel&) { return std::string("p-spin"); },
                               [](const EdwardsAndersonModel&) { return std::string("ea"); },
                               [](const RemModel&) { return std::string("rem"); }},
                    variant_);
}

const Graph& ModelSpec::graph() const {
  if (const auto* ea = std::get_if<EdwardsAndersonModel>(&variant_)) return ea->graph;
  throw unsupported_error("graph() is only defined for the E-A model");
}

double ModelSpec::xi(double x) const {
  if (is_sk()) return 0.5 * x * x;
  if (const auto* ps = std::get_if<MixedPSpinModel>(&variant_)) {
    double out = 0.0;
    for (auto [p, c] : ps->coefficients) out += c * std::pow(x, p);
    return out;
  }
  throw unsupported_error("xi() is only defined for SK and mixed p-spin models");
}

void check_disorder(const ModelSpec& model, const DisorderVector& g) {
  if (g.size() != model.coupling_count()) {
    throw shape_error("disorder has " + std::to_string(g.size()) + " couplings, model " + model.name() + " needs " +
                      std::to_string(model.coupling_count()));
  }
}

namespace {

void check_sites(const ModelSpec& model, const SpinConfiguration& s) {
  if (s.n_sites() != model.n_sites()) throw shape_error("configuration size does not match the model");
}

// -H for the p-spin model by direct tuple summation.
double p_spin_field(const MixedPSpinModel& m, const DisorderVector& g, const SpinConfiguration& s) {
  const auto spins = s.spins();
  const std::size_t n = static_cast<std::size_t>(m.n);
  double total = 0.0;
  std::size_t offset = 0;
  for (auto [p, c] : m.coefficients) {
    const std::size_t count = ipow(n, p);
    double block = 0.0;
    std::vector<std::size_t> tuple(static_cast<std::size_t>(p), 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
      int prod = 1;
      for (std::size_t k : tuple) prod *= spins[k];
      block += g.values[offset + idx] * prod;
      for (int k = p - 1; k >= 0; --k) {
        if (++tuple[static_cast<std::size_t>(k)] < n) break;
        tuple[static_cast<std::size_t>(k)] = 0;
      }
    }
    total += p_spin_weight(m.n, p, c) * block;
    offset += count;
  }
  return total;
}

}  // namespace

double field_value(const ModelSpec& model, const DisorderVector& g, const SpinConfiguration& s) {
  check_disorder(model, g);
  check_sites(model, s);
  return std::visit(overloaded{[&](const SkModel& m) {
                                 const auto spins = s.spins();
                                 double x = 0.0;
                                 for (int i = 0; i < m.n; ++i) {
                                   double row = 0.0;
                                   for (int j = 0; j < m.n; ++j) row += g.values[static_cast<std::size_t>(i * m.n + j)] * spins[static_cast<std::size_t>(j)];
                                   x += row * spins[static_cast<std::size_t>(i)];
                                 }
                                 return x;
                               },
                               [&](const MixedPSpinModel& m) { return p_spin_field(m, g, s); },
                               [&](const EdwardsAndersonModel& m) {
                                 double x = 0.0;
                                 const auto& edges = m.graph.edges();
                                 for (std::size_t e = 0; e < edges.size(); ++e) x += g.values[e] * s.spin(edges[e].first) * s.spin(edges[e].second);
                                 return x;
                               },
                               [&](const RemModel& m) { return std::sqrt(static_cast<double>(m.n)) * g.values[s.index()]; }},
                    model.variant());
}

double field_scale(const ModelSpec& model) {
  if (model.is_sk()) return 1.0 / std::sqrt(2.0 * model.n_sites());
  return 1.0;
}

double hamiltonian(const ModelSpec& model, const DisorderVector& g, const SpinConfiguration& s) {
  return -field_scale(model) * field_value(model, g, s);
}

OverlapValue site_overlap(const SpinConfiguration& a, const SpinConfiguration& b) {
  const int d = hamming_distance(a, b);
  return {static_cast<double>(a.n_sites() - 2 * d) / a.n_sites()};
}

OverlapValue bond_overlap(const Graph& graph, const SpinConfiguration& a, const SpinConfiguration& b) {
  if (a.n_sites() != graph.n_vertices() || b.n_sites() != graph.n_vertices()) {
    throw shape_error("bond_overlap: configuration size does not match the graph");
  }
  if (graph.n_edges() == 0) throw invalid_parameter("bond_overlap: graph has no edges");
  int sum = 0;
  for (auto [i, j] : graph.edges()) sum += a.spin(i) * a.spin(j) * b.spin(i) * b.spin(j);
  return {static_cast<double>(sum) / static_cast<double>(graph.n_edges())};
}

double covariance_kernel(const ModelSpec& model, const SpinConfiguration& a, const SpinConfiguration& b) {
  check_sites(model, a);
  check_sites(model, b);
  const double n = model.n_sites();
  if (model.is_rem()) return a == b ? n : 0.0;
  if (model.is_ea()) return bond_overlap(model.graph(), a, b).value * static_cast<double>(model.graph().n_edges());
  return n * model.xi(site_overlap(a, b).value);
}

double field_covariance(const ModelSpec& model, const SpinConfiguration& a, const SpinConfiguration& b) {
  const double scale = field_scale(model);
  return covariance_kernel(model, a, b) / (scale * scale);
}

double MultilinearForm::evaluate(std::uint64_t index) const {
  double h = constant;
  for (const auto& term : terms) {
    const int odd = std::popcount(~index & term.mask) & 1;
    h += odd ? -term.coeff : term.coeff;
  }
  return h;
}

double MultilinearForm::evaluate(const std::vector<int>& spins) const {
  double h = constant;
  for (const auto& term : terms) {
    int prod = 1;
    for (int i : term.sites) prod *= spins[static_cast<std::size_t>(i)];
    h += prod * term.coeff;
  }
  return h;
}

namespace {

void finalize(MultilinearForm& form) {
  form.terms_of_site.assign(static_cast<std::size_t>(form.n_sites), {});
  for (std::size_t t = 0; t < form.terms.size(); ++t) {
    auto& term = form.terms[t];
    term.mask = 0;
    for (int i : term.sites) {
      if (form.n_sites <= 64) term.mask |= std::uint64_t{1} << i;
      form.terms_of_site[static_cast<std::size_t>(i)].push_back(static_cast<int>(t));
    }
  }
}

}  // namespace

MultilinearForm hamiltonian_terms(const ModelSpec& model, const DisorderVector& g) {
  check_disorder(model, g);
  MultilinearForm form;
  form.n_sites = model.n_sites();
  std::visit(overloaded{[&](const SkModel& m) {
                          const double scale = -1.0 / std::sqrt(2.0 * m.n);
                          const auto idx = [&](int i, int j) { return static_cast<std::size_t>(i * m.n + j); };
                          for (int i = 0; i < m.n; ++i) form.constant += scale * g.values[idx(i, i)];
                          for (int i = 0; i < m.n; ++i) {
                            for (int j = i + 1; j < m.n; ++j) {
                              form.terms.push_back({{i, j}, scale * (g.values[idx(i, j)] + g.values[idx(j, i)]), 0});
                            }
                          }
                        },
                        [&](const MixedPSpinModel& m) {
                          // Reduce every ordered tuple to the set of sites with odd multiplicity.
                          std::map<std::vector<int>, double> reduced;
                          const std::size_t n = static_cast<std::size_t>(m.n);
                          std::size_t offset = 0;
                          for (auto [p, c] : m.coefficients) {
                            const double w = -p_spin_weight(m.n, p, c);
                            const std::size_t count = ipow(n, p);
                            std::vector<int> tuple(static_cast<std::size_t>(p), 0);
                            std::vector<int> key;
                            for (std::size_t t = 0; t < count; ++t) {
                              key = tuple;
                              std::sort(key.begin(), key.end());
                              std::vector<int> odd;
                              for (std::size_t a = 0; a < key.size();) {
                                std::size_t b = a;
                                while (b < key.size() && key[b] == key[a]) ++b;
                                if ((b - a) % 2 == 1) odd.push_back(key[a]);
                                a = b;
                              }
                              reduced[odd] += w * g.values[offset + t];
                              for (int k = p - 1; k >= 0; --k) {
                                if (++tuple[static_cast<std::size_t>(k)] < m.n) break;
                                tuple[static_cast<std::size_t>(k)] = 0;
                              }
                            }
                            offset += count;
                          }
                          for (auto& [sites, coeff] : reduced) {
                            if (sites.empty()) {
                              form.constant += coeff;
                            } else {
                              form.terms.push_back({sites, coeff, 0});
                            }
                          }
                        },
                        [&](const EdwardsAndersonModel& m) {
                          const auto& edges = m.graph.edges();
                          for (std::size_t e = 0; e < edges.size(); ++e) {
                            form.terms.push_back({{edges[e].first, edges[e].second}, -g.values[e], 0});
                          }
                        },
                        [&](const RemModel&) {
                          throw unsupported_error("the REM has no multilinear Hamiltonian; use its energy table");
                        }},
             model.variant());
  finalize(form);
  return form;
}

nlohmann::json to_json(const ModelSpec& model) {
  return std::visit(overloaded{[](const SkModel& m) { return nlohmann::json{{"kind", "sk"}, {"n", m.n}}; },
                               [](const MixedPSpinModel& m) {
                                 nlohmann::json coeffs = nlohmann::json::object();
                                 for (auto [p, c] : m.coefficients) coeffs[std::to_string(p)] = c;
                                 return nlohmann::json{{"kind", "p-spin"}, {"n", m.n}, {"coefficients", coeffs}};
                               },
                               [](const EdwardsAndersonModel& m) {
                                 return nlohmann::json{{"kind", "ea"}, {"graph", to_json(m.graph)}};
                               },
                               [](const RemModel& m) { return nlohmann::json{{"kind", "rem"}, {"n", m.n}}; }},
                    model.variant());
}

Graph graph_spec_from_json(const nlohmann::json& j) {
  if (j.contains("type")) {
    const auto type = j.at("type").get<std::string>();
    if (type == "cycle") return Graph::cycle(j.at("n").get<int>());
    if (type == "complete") return Graph::complete(j.at("n").get<int>());
    if (type == "torus") return Graph::torus(j.at("rows").get<int>(), j.at("cols").get<int>());
    if (type == "edge") return Graph(2, {{0, 1}});
    throw invalid_parameter("unknown graph type '" + type + "'");
  }
  return graph_from_json(j);
}

ModelSpec model_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "sk") return ModelSpec::sk(j.at("n").get<int>());
  if (kind == "rem") return ModelSpec::rem(j.at("n").get<int>());
  if (kind == "ea") return ModelSpec::edwards_anderson(graph_spec_from_json(j.at("graph")));
  if (kind == "p-spin") {
    std::map<int, double> coeffs;
    for (const auto& [key, value] : j.at("coefficients").items()) coeffs[std::stoi(key)] = value.get<double>();
    return ModelSpec::mixed_p_spin(j.at("n").get<int>(), std::move(coeffs));
  }
  throw invalid_parameter("unknown model kind '" + kind + "'");
}

}  // namespace chaoslab
