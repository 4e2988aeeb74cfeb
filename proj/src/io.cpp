#include "dsps/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "dsps/error.hpp"

namespace dsps::io {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidConfig, where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, where + ": bad \"" + key + "\" (" + e.what() + ")");
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::variant<synth::Normal, synth::LogNormal> simple_dist(const json& j, const std::string& where) {
  const auto kind = field<std::string>(j, "dist", where);
  const double mu = field<double>(j, "mu", where);
  const double sigma = field<double>(j, "sigma", where);
  if (kind == "normal") return synth::Normal{mu, sigma};
  if (kind == "lognormal") return synth::LogNormal{mu, sigma};
  throw Error(ErrorCode::InvalidSpec, where + ": unknown dist '" + kind + "'");
}

json simple_dist_json(const std::variant<synth::Normal, synth::LogNormal>& d) {
  if (const auto* n = std::get_if<synth::Normal>(&d)) return {{"dist", "normal"}, {"mu", n->mu}, {"sigma", n->sigma}};
  const auto& l = std::get<synth::LogNormal>(d);
  return {{"dist", "lognormal"}, {"mu", l.mu}, {"sigma", l.sigma}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

TargetSet targets_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "targets must be a JSON array");
  std::vector<TargetCriterion> criteria;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "targets[" + std::to_string(i) + "]";
    criteria.push_back({field<std::string>(j[i], "feature", where), field<int>(j[i], "order", where),
                        field<double>(j[i], "value", where)});
  }
  return TargetSet(std::move(criteria));
}

json to_json(const TargetSet& targets) {
  json arr = json::array();
  for (const auto& c : targets) arr.push_back({{"feature", c.feature}, {"order", c.order}, {"value", c.value}});
  return arr;
}

TargetSet read_targets_file(const std::string& path) { return targets_from_json(read_json_file(path)); }

synth::SynthSpec synth_spec_from_json(const json& j) {
  try {
    synth::SynthSpec spec;
    spec.n_p = field<Eigen::Index>(j, "n_p", "spec");
    spec.seed = j.contains("seed") ? field<std::uint64_t>(j, "seed", "spec") : 0;
    if (j.contains("id_prefix")) spec.id_prefix = field<std::string>(j, "id_prefix", "spec");
    const auto& feats = j.at("features");
    if (!feats.is_array()) throw Error(ErrorCode::InvalidSpec, "spec: \"features\" must be an array");
    for (std::size_t i = 0; i < feats.size(); ++i) {
      const std::string where = "features[" + std::to_string(i) + "]";
      synth::FeatureSpec f;
      f.name = field<std::string>(feats[i], "name", where);
      const auto kind = field<std::string>(feats[i], "dist", where);
      if (kind == "mixture") {
        synth::Mixture mix;
        const auto& comps = feats[i].at("components");
        for (std::size_t c = 0; c < comps.size(); ++c) {
          const std::string cw = where + ".components[" + std::to_string(c) + "]";
          mix.components.push_back({field<double>(comps[c], "weight", cw), simple_dist(comps[c], cw)});
        }
        f.generator = std::move(mix);
      } else {
        std::visit([&](auto d) { f.generator = d; }, simple_dist(feats[i], where));
      }
      spec.features.push_back(std::move(f));
    }
    synth::validate(spec);
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw Error(ErrorCode::InvalidSpec, e.what());
    throw;
  }
}

json to_json(const synth::SynthSpec& spec) {
  json feats = json::array();
  for (const auto& f : spec.features) {
    json jf;
    if (const auto* mix = std::get_if<synth::Mixture>(&f.generator)) {
      jf = {{"dist", "mixture"}, {"components", json::array()}};
      for (const auto& c : mix->components) {
        json jc = simple_dist_json(c.dist);
        jc["weight"] = c.weight;
        jf["components"].push_back(jc);
      }
    } else if (const auto* n = std::get_if<synth::Normal>(&f.generator)) {
      jf = simple_dist_json(*n);
    } else {
      jf = simple_dist_json(std::get<synth::LogNormal>(f.generator));
    }
    jf["name"] = f.name;
    feats.push_back(jf);
  }
  return {{"n_p", spec.n_p}, {"seed", spec.seed}, {"id_prefix", spec.id_prefix}, {"features", feats}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_probabilities_csv(std::ostream& out, const Population& pop, const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() != pop.size()) throw Error(ErrorCode::LengthMismatch, "probabilities and population differ in length");
  out << "member_id,p\n";
  for (Eigen::Index i = 0; i < p.size(); ++i)
    out << pop.member_ids()[static_cast<std::size_t>(i)] << ',' << format_double(p[i]) << '\n';
}

void write_mask_csv(std::ostream& out, const Population& pop, const SelectionMask& mask) {
  if (mask.size() != pop.size()) throw Error(ErrorCode::LengthMismatch, "mask and population differ in length");
  out << "member_id,selected\n";
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    out << pop.member_ids()[static_cast<std::size_t>(i)] << ',' << int(mask.bits[static_cast<std::size_t>(i)]) << '\n';
}

SelectionMask read_mask_csv(std::istream& in, const Population& pop) {
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < pop.member_ids().size(); ++i) where.emplace(pop.member_ids()[i], i);

  SelectionMask mask;
  mask.bits.assign(pop.member_ids().size(), 0);
  std::vector<bool> seen(pop.member_ids().size(), false);
  std::size_t rows = 0;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = trim(line);
    if (v.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto comma = v.find(',');
    if (comma == std::string_view::npos || v.find(',', comma + 1) != std::string_view::npos)
      throw Error(ErrorCode::MalformedCsv, "mask line " + std::to_string(line_no) + " needs exactly two cells");
    const std::string id(trim(v.substr(0, comma)));
    const auto bit = trim(v.substr(comma + 1));
    if (bit != "0" && bit != "1")
      throw Error(ErrorCode::MalformedCsv, "mask line " + std::to_string(line_no) + ": selected must be 0 or 1");
    const auto it = where.find(id);
    if (it == where.end()) throw Error(ErrorCode::LengthMismatch, "mask member '" + id + "' not in population");
    if (seen[it->second]) throw Error(ErrorCode::DuplicateMemberId, "mask member '" + id + "' repeats");
    seen[it->second] = true;
    mask.bits[it->second] = bit == "1" ? 1 : 0;
    ++rows;
  }
  if (rows != pop.member_ids().size())
    throw Error(ErrorCode::LengthMismatch, "mask has " + std::to_string(rows) + " rows, population has " +
                                               std::to_string(pop.member_ids().size()));
  return mask;
}

json to_json(const EvaluationReport& report) {
  json criteria = json::array();
  for (const auto& c : report.criteria)
    criteria.push_back({{"feature", c.feature},
                        {"order", c.order},
                        {"target", c.target},
                        {"achieved", c.achieved},
                        {"expected", optional_number(c.expected)},
                        {"percentage_error", c.percentage_error}});
  json j = {{"schema", kSchema},      {"criteria", criteria},           {"rsse", report.rsse},
            {"pe_mean", report.pe_mean}, {"pe_sd", report.pe_sd}, {"expected_size", report.expected_size}};
  j["realized_size"] = report.realized_size ? json(*report.realized_size) : json(nullptr);
  return j;
}

json to_json(const SolverSummary& solver) {
  return {{"status", lp::to_string(solver.status)},
          {"iterations", solver.iterations},
          {"objective_value", solver.objective_value},
          {"max_residual", solver.max_residual}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace dsps::io
