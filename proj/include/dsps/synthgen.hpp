#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dsps/population.hpp"
#include "dsps/targets.hpp"

namespace dsps::synth {

struct Normal {
  double mu = 0.0;
  double sigma = 1.0;
};

/// exp(N(mu, sigma)).
struct LogNormal {
  double mu = 0.0;
  double sigma = 1.0;
};

struct MixtureComponent {
  double weight = 1.0;
  std::variant<Normal, LogNormal> dist;
};

struct Mixture {
  std::vector<MixtureComponent> components;
};

using Generator = std::variant<Normal, LogNormal, Mixture>;

struct FeatureSpec {
  std::string name;
  Generator generator;
};

struct SynthSpec {
  Eigen::Index n_p = 0;
  std::vector<FeatureSpec> features;
  std::uint64_t seed = 0;
  std::string id_prefix = "m";
};

/// Throws InvalidSpec.
void validate(const SynthSpec& spec);

/// Column j is drawn i.i.d. from its generator using substream(seed, j).
/// Member ids are id_prefix followed by the 1-based row number.
Population generate_population(const SynthSpec& spec);

/// Targets equal to the realized moments of rows `indices` for every
/// requested order (and every feature, unless `features` is given).
TargetSet plant_subset(const Population& pop, std::span<const Eigen::Index> indices,
                       std::span<const int> orders, std::span<const std::string> features = {});

}  // namespace dsps::synth
