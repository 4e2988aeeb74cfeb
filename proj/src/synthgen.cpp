#include "dsps/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "dsps/error.hpp"
#include "dsps/moments.hpp"
#include "dsps/rng.hpp"

namespace dsps::synth {

namespace {

// Box-Muller, cosine branch only, so each variate uses exactly two uniforms.
double standard_normal(rng::Xoshiro256& gen) {
  const double u1 = 1.0 - gen.uniform();  // (0, 1]
  const double u2 = gen.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Sampler {
  rng::Xoshiro256& gen;

  double operator()(const Normal& d) const { return d.mu + d.sigma * standard_normal(gen); }
  double operator()(const LogNormal& d) const { return std::exp(d.mu + d.sigma * standard_normal(gen)); }
  double operator()(const Mixture& m) const {
    const double u = gen.uniform();
    double acc = 0.0;
    for (const auto& c : m.components) {
      acc += c.weight;
      if (u < acc) return std::visit(*this, c.dist);
    }
    return std::visit(*this, m.components.back().dist);
  }
};

void check_sigma(double mu, double sigma, const std::string& feature) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0)
    throw Error(ErrorCode::InvalidSpec, "feature '" + feature + "': need finite mu and sigma >= 0");
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.n_p < 1) throw Error(ErrorCode::InvalidSpec, "n_p must be >= 1");
  if (spec.features.empty()) throw Error(ErrorCode::InvalidSpec, "at least one feature is required");
  std::set<std::string> names;
  for (const auto& f : spec.features) {
    if (f.name.empty()) throw Error(ErrorCode::InvalidSpec, "feature without a name");
    if (!names.insert(f.name).second) throw Error(ErrorCode::InvalidSpec, "feature '" + f.name + "' repeats");
    const auto check_simple = [&](const auto& d) { check_sigma(d.mu, d.sigma, f.name); };
    if (const auto* mix = std::get_if<Mixture>(&f.generator)) {
      if (mix->components.empty()) throw Error(ErrorCode::InvalidSpec, "feature '" + f.name + "': empty mixture");
      double total = 0.0;
      for (const auto& c : mix->components) {
        if (!(c.weight >= 0) || !std::isfinite(c.weight))
          throw Error(ErrorCode::InvalidSpec, "feature '" + f.name + "': mixture weights must be >= 0");
        total += c.weight;
        std::visit(check_simple, c.dist);
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidSpec, "feature '" + f.name + "': mixture weights must sum to 1");
    } else if (const auto* n = std::get_if<Normal>(&f.generator)) {
      check_simple(*n);
    } else {
      check_simple(std::get<LogNormal>(f.generator));
    }
  }
}

Population generate_population(const SynthSpec& spec) {
  validate(spec);
  const auto n_x = static_cast<Eigen::Index>(spec.features.size());
  Eigen::MatrixXd data(spec.n_p, n_x);
  for (Eigen::Index j = 0; j < n_x; ++j) {
    auto gen = rng::substream(spec.seed, static_cast<std::uint64_t>(j));
    const Sampler sample{gen};
    const auto& g = spec.features[static_cast<std::size_t>(j)].generator;
    for (Eigen::Index i = 0; i < spec.n_p; ++i) data(i, j) = std::visit(sample, g);
  }
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(spec.n_p));
  for (Eigen::Index i = 0; i < spec.n_p; ++i) ids.push_back(spec.id_prefix + std::to_string(i + 1));
  std::vector<std::string> names;
  for (const auto& f : spec.features) names.push_back(f.name);
  return Population(std::move(ids), std::move(names), std::move(data));
}

TargetSet plant_subset(const Population& pop, std::span<const Eigen::Index> indices, std::span<const int> orders,
                       std::span<const std::string> features) {
  if (indices.empty()) throw Error(ErrorCode::EmptyIndices, "planted subset is empty");
  std::set<Eigen::Index> unique(indices.begin(), indices.end());
  if (unique.size() != indices.size()) throw Error(ErrorCode::IndexOutOfRange, "planted indices repeat");
  const Population sub = subset_rows(pop, indices);

  std::vector<std::string> names(features.begin(), features.end());
  if (names.empty()) names = pop.feature_names();

  std::vector<TargetCriterion> criteria;
  for (const auto& name : names) {
    const Eigen::VectorXd x = feature_column(sub, name);
    for (int k : orders) {
      if (k >= 2 && x.size() < 2)
        throw Error(ErrorCode::InsufficientForOrder,
                    "order " + std::to_string(k) + " needs at least 2 planted members, got " + std::to_string(x.size()));
      criteria.push_back({name, k, sample_moment(x, k)});
    }
  }
  return TargetSet(std::move(criteria));
}

}  // namespace dsps::synth
