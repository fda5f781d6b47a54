#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "chaoslab/disorder.hpp"
#include "chaoslab/graph.hpp"
#include "chaoslab/spin.hpp"

namespace chaoslab {

// Largest N for which the REM energy table (one coupling per state) is stored.
inline constexpr int kMaxRemSites = 24;

struct SkModel {
  int n;
};

// H = -sum_p sqrt(c_p) N^{(1-p)/2} sum_{i_1..i_p} g_{i_1..i_p} sigma_{i_1}...sigma_{i_p},
// summed over ordered tuples, so Cov(H(s), H(s')) = N xi(R) with xi(x) = sum_p c_p x^p.
struct MixedPSpinModel {
  int n;
  std::map<int, double> coefficients;  // p -> c_p
};

struct EdwardsAndersonModel {
  Graph graph;
};

struct RemModel {
  int n;
};

class ModelSpec {
 public:
  using Variant = std::variant<SkModel, MixedPSpinModel, EdwardsAndersonModel, RemModel>;

  static ModelSpec sk(int n);
  static ModelSpec mixed_p_spin(int n, std::map<int, double> coefficients);
  static ModelSpec edwards_anderson(Graph graph);
  static ModelSpec rem(int n);

  const Variant& variant() const { return variant_; }
  int n_sites() const;
  std::size_t coupling_count() const;
  std::string name() const;

  bool is_sk() const { return std::holds_alternative<SkModel>(variant_); }
  bool is_rem() const { return std::holds_alternative<RemModel>(variant_); }
  bool is_ea() const { return std::holds_alternative<EdwardsAndersonModel>(variant_); }
  bool is_p_spin() const { return std::holds_alternative<MixedPSpinModel>(variant_); }
  const Graph& graph() const;

  // xi(x) = sum_p c_p x^p for mixed p-spin; x^2/2 for SK.
  double xi(double x) const;

 private:
  explicit ModelSpec(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

struct OverlapValue {
  double value;
};

// Raw field of the model: X_N(sigma) = sum_{i,j} g_ij s_i s_j for SK,
// sum over edges for E-A, sqrt(N) g_sigma for REM, -H for mixed p-spin.
double field_value(const ModelSpec& model, const DisorderVector& g, const SpinConfiguration& s);

// -H = field_scale * field_value. 1/sqrt(2N) for SK, 1 otherwise.
double field_scale(const ModelSpec& model);

double hamiltonian(const ModelSpec& model, const DisorderVector& g, const SpinConfiguration& s);

OverlapValue site_overlap(const SpinConfiguration& a, const SpinConfiguration& b);
OverlapValue bond_overlap(const Graph& graph, const SpinConfiguration& a, const SpinConfiguration& b);

// Cov(-H(a), -H(b)) over the disorder: N R^2 / 2 (SK), N xi(R) (p-spin),
// |E| Q (E-A), N 1{a = b} (REM).
double covariance_kernel(const ModelSpec& model, const SpinConfiguration& a, const SpinConfiguration& b);

// Cov(field_value(a), field_value(b)). For SK this is (sum_i a_i b_i)^2 = N^2 R^2.
double field_covariance(const ModelSpec& model, const SpinConfiguration& a, const SpinConfiguration& b);

// H(sigma) = constant + sum_terms coeff * prod_{i in sites} sigma_i, with each
// site set distinct. Not available for the REM.
struct InteractionTerm {
  std::vector<int> sites;
  double coeff = 0.0;
  std::uint64_t mask = 0;  // bit set of `sites` when n_sites <= 64
};

struct MultilinearForm {
  int n_sites = 0;
  double constant = 0.0;
  std::vector<InteractionTerm> terms;
  std::vector<std::vector<int>> terms_of_site;

  double evaluate(std::uint64_t index) const;
  double evaluate(const std::vector<int>& spins) const;
};

MultilinearForm hamiltonian_terms(const ModelSpec& model, const DisorderVector& g);

void check_disorder(const ModelSpec& model, const DisorderVector& g);

nlohmann::json to_json(const ModelSpec& model);
ModelSpec model_from_json(const nlohmann::json& j);
// {"type": "cycle" | "complete" | "torus" | "edge", ...} or an explicit edge list.
Graph graph_spec_from_json(const nlohmann::json& j);

}  // namespace chaoslab
