#pragma once

#include <istream>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "dsps/evaluate.hpp"
#include "dsps/mask.hpp"
#include "dsps/population.hpp"
#include "dsps/selection.hpp"
#include "dsps/synthgen.hpp"
#include "dsps/targets.hpp"

namespace dsps::io {

inline constexpr const char* kSchema = "dsps/1";

/// JSON array of {"feature", "order", "value"}.
TargetSet targets_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TargetSet& targets);
TargetSet read_targets_file(const std::string& path);

synth::SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const synth::SynthSpec& spec);

void write_probabilities_csv(std::ostream& out, const Population& pop, const Eigen::Ref<const Eigen::VectorXd>& p);

/// member_id,selected with 0/1 values.
void write_mask_csv(std::ostream& out, const Population& pop, const SelectionMask& mask);
/// Reads a mask aligned to pop's member order; every member must appear once.
SelectionMask read_mask_csv(std::istream& in, const Population& pop);

nlohmann::json to_json(const EvaluationReport& report);
nlohmann::json to_json(const SolverSummary& solver);

/// %.17g: enough digits for any double to read back exactly.
std::string format_double(double v);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace dsps::io
