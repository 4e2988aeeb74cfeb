#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dsps/error.hpp"
#include "dsps/evaluate.hpp"
#include "dsps/io.hpp"
#include "dsps/population.hpp"
#include "dsps/realize.hpp"
#include "dsps/selection.hpp"
#include "dsps/synthgen.hpp"

namespace dsps::cli {

namespace {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Infeasible: return kInfeasible;
    case ErrorCode::AllDrawsDegenerate: return kDegenerateDraws;
    case ErrorCode::NumericalBreakdown:
    case ErrorCode::IterationLimit: return kSolverFailure;
    default: return kInputError;
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

struct SelectConfig {
  std::string population;
  std::string targets;
  std::string mode = "max";
  std::optional<std::int64_t> n_target;
  std::optional<double> alpha;
  std::optional<std::int64_t> trial_size;
  std::vector<double> beta;
  std::vector<double> eta_max;
  double epsilon = kDefaultEpsilon;
  std::optional<std::uint64_t> seed;
  std::int64_t draws = 10;
  std::string out;
  double rsse_epsilon = 0.0;
};

std::uint64_t resolve_seed(const SelectConfig& cfg, std::string& source) {
  if (cfg.seed) {
    source = "flag";
    return *cfg.seed;
  }
  if (const char* env = std::getenv("DSPS_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      source = "env";
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, std::string("DSPS_SEED='") + env + "' is not an unsigned integer");
    }
  }
  source = "default";
  return 0;
}

int cmd_select(const SelectConfig& cfg, std::ostream& out, std::ostream& err) {
  const Population pop = load_population_file(cfg.population);
  const TargetSet targets = io::read_targets_file(cfg.targets);
  for (const auto& c : targets) pop.feature_index(c.feature);
  const Mode mode = parse_mode(cfg.mode);
  if (cfg.draws < 1) throw Error(ErrorCode::InvalidConfig, "--draws must be >= 1");
  if (mode == Mode::Fixed && !cfg.n_target) throw Error(ErrorCode::InvalidConfig, "--mode fixed needs --n-target");
  if ((mode == Mode::Max || mode == Mode::Min) && !cfg.alpha && !cfg.trial_size)
    throw Error(ErrorCode::InvalidConfig, "--mode " + cfg.mode + " needs --alpha or --trial-size");

  HyperParams hyper;
  hyper.alpha = cfg.alpha;
  hyper.trial_size = cfg.trial_size;
  hyper.epsilon = cfg.epsilon;
  if (!cfg.beta.empty()) hyper.beta = Eigen::Map<const Eigen::VectorXd>(cfg.beta.data(), Eigen::Index(cfg.beta.size()));
  if (!cfg.eta_max.empty())
    hyper.eta_max = Eigen::Map<const Eigen::VectorXd>(cfg.eta_max.data(), Eigen::Index(cfg.eta_max.size()));

  std::string seed_source;
  const std::uint64_t seed = resolve_seed(cfg, seed_source);

  std::filesystem::create_directories(cfg.out);
  const auto path = [&](const char* name) { return (std::filesystem::path(cfg.out) / name).string(); };

  json run = {{"schema", io::kSchema},
              {"command", "select"},
              {"population", cfg.population},
              {"targets", cfg.targets},
              {"mode", to_string(mode)},
              {"n_target", cfg.n_target ? json(*cfg.n_target) : json(nullptr)},
              {"seed", seed},
              {"seed_source", seed_source},
              {"draws", cfg.draws},
              {"epsilon", cfg.epsilon},
              {"rsse_epsilon", cfg.rsse_epsilon}};

  SelectionProbabilities sel;
  try {
    sel = select(pop, targets, mode, hyper, cfg.n_target);
  } catch (const Error& e) {
    run["status"] = to_string(e.code());
    io::write_text_file(path("run.json"), dump(run));
    throw;
  }

  const HyperParams& h = sel.hyper;
  run["alpha"] = h.alpha ? json(*h.alpha) : json(nullptr);
  run["trial_size"] = h.trial_size ? json(*h.trial_size) : json(nullptr);
  run["beta"] = h.beta ? vector_json(*h.beta) : json(nullptr);
  run["eta_max"] = h.eta_max ? vector_json(*h.eta_max) : json(nullptr);
  json rows = json::array();
  for (const auto& r : sel.rows) rows.push_back(r.to_string());
  run["rows"] = rows;
  run["row_eta_max"] = vector_json(sel.eta_max);
  run["solver"] = io::to_json(sel.solver);

  {
    std::ostringstream csv;
    io::write_probabilities_csv(csv, pop, sel.p);
    io::write_text_file(path("probabilities.csv"), csv.str());
  }

  BestDraw best;
  try {
    best = draw_best(sel.p, pop, targets, cfg.draws, seed, cfg.rsse_epsilon);
  } catch (const Error& e) {
    run["status"] = to_string(e.code());
    io::write_text_file(path("run.json"), dump(run));
    throw;
  }

  EvaluationReport report = evaluate_selection(pop, targets, best.best.mask, cfg.rsse_epsilon);
  attach_expected(report, pop, targets, sel.p);

  json rj = io::to_json(report);
  rj["mode"] = to_string(mode);
  rj["solver"] = io::to_json(sel.solver);
  json draws = json::array();
  for (const auto& d : best.draws)
    draws.push_back({{"draw_index", d.draw_index}, {"size", d.size}, {"rsse", std::isfinite(d.rsse) ? json(d.rsse) : json(nullptr)}});
  rj["seeds"] = {{"seed", seed}, {"n_draws", cfg.draws}, {"best_draw_index", best.best.mask.draw_index}, {"draws", draws}};
  rj["eta"] = vector_json(sel.eta);
  rj["small_sample_warning"] = sel.small_sample_warning;
  json warnings = json::array();
  if (sel.small_sample_warning) {
    std::ostringstream msg;
    msg << "SmallSampleWarning: expected size " << sel.expected_size << " is below " << kSmallSampleThreshold
        << "; realized moments may deviate from the targets";
    warnings.push_back(msg.str());
    err << "warning: " << msg.str() << "\n";
  }
  rj["warnings"] = warnings;

  {
    std::ostringstream csv;
    io::write_mask_csv(csv, pop, best.best.mask);
    io::write_text_file(path("mask.csv"), csv.str());
  }
  io::write_text_file(path("report.json"), dump(rj));
  run["status"] = "Optimal";
  io::write_text_file(path("run.json"), dump(run));

  out << "mode " << to_string(mode) << ": expected size " << sel.expected_size << ", best draw "
      << best.best.mask.draw_index << " selects " << best.best.size << " members, rsse " << report.rsse
      << ", pe_mean " << report.pe_mean << "%\n";
  return kOk;
}

int cmd_generate(const std::string& spec_path, const std::string& out_path, std::ostream& out) {
  const synth::SynthSpec spec = io::synth_spec_from_json(io::read_json_file(spec_path));
  const Population pop = synth::generate_population(spec);
  std::ostringstream csv;
  write_population(csv, pop);
  io::write_text_file(out_path, csv.str());
  out << "wrote " << pop.size() << " members x " << pop.n_features() << " features to " << out_path << "\n";
  return kOk;
}

int cmd_evaluate(const std::string& pop_path, const std::string& targets_path, const std::string& mask_path,
                 const std::string& out_path, double rsse_epsilon, std::ostream& out) {
  const Population pop = load_population_file(pop_path);
  const TargetSet targets = io::read_targets_file(targets_path);
  std::ifstream in(mask_path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + mask_path + "'");
  const SelectionMask mask = io::read_mask_csv(in, pop);
  const std::string text = dump(io::to_json(evaluate_selection(pop, targets, mask, rsse_epsilon)));
  if (out_path.empty() || out_path == "-")
    out << text;
  else
    io::write_text_file(out_path, text);
  return kOk;
}

int cmd_targets(const std::string& pop_path, const std::string& mask_path, const std::vector<int>& orders,
                const std::vector<std::string>& features, const std::string& out_path, std::ostream& out) {
  const Population pop = load_population_file(pop_path);
  std::vector<Eigen::Index> rows;
  if (mask_path.empty()) {
    for (Eigen::Index i = 0; i < pop.size(); ++i) rows.push_back(i);
  } else {
    std::ifstream in(mask_path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + mask_path + "'");
    const SelectionMask mask = io::read_mask_csv(in, pop);
    for (Eigen::Index i = 0; i < mask.size(); ++i)
      if (mask.bits[static_cast<std::size_t>(i)]) rows.push_back(i);
  }
  const TargetSet targets = synth::plant_subset(pop, rows, orders, features);
  const std::string text = dump(io::to_json(targets));
  if (out_path.empty() || out_path == "-")
    out << text;
  else
    io::write_text_file(out_path, text);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moment-matched sub-population selection", "dsps"};
  app.require_subcommand(1);

  SelectConfig sc;
  auto* select_cmd = app.add_subcommand("select", "solve for selection probabilities, draw and score a cohort");
  select_cmd->add_option("--population", sc.population, "population CSV")->required();
  select_cmd->add_option("--targets", sc.targets, "targets JSON")->required();
  select_cmd->add_option("--mode", sc.mode, "max | max-strict | fixed | min")->capture_default_str();
  select_cmd->add_option("--n-target", sc.n_target, "sample size for --mode fixed");
  select_cmd->add_option("--alpha", sc.alpha, "error/size trade-off (overrides --trial-size)");
  select_cmd->add_option("--trial-size", sc.trial_size, "reference trial size; alpha = 5% of it");
  select_cmd->add_option("--beta", sc.beta, "per-row slack penalties, target-file order")->delimiter(',');
  select_cmd->add_option("--eta-max", sc.eta_max, "per-row slack caps, target-file order")->delimiter(',');
  select_cmd->add_option("--epsilon", sc.epsilon, "denominator guard")->capture_default_str();
  select_cmd->add_option("--seed", sc.seed, "master seed (fallback: DSPS_SEED, then 0)");
  select_cmd->add_option("--draws", sc.draws, "Bernoulli draws to score")->capture_default_str();
  select_cmd->add_option("--out", sc.out, "output directory")->required();
  select_cmd->add_option("--rsse-epsilon", sc.rsse_epsilon, "opt-in guard for zero targets in RSSE/PE");

  std::string spec_path, gen_out;
  auto* generate_cmd = app.add_subcommand("generate", "write a synthetic population CSV");
  generate_cmd->add_option("--spec", spec_path, "synthetic population spec JSON")->required();
  generate_cmd->add_option("--out", gen_out, "output CSV")->required();

  std::string ev_pop, ev_targets, ev_mask, ev_out;
  double ev_eps = 0.0;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a mask against targets");
  evaluate_cmd->add_option("--population", ev_pop, "population CSV")->required();
  evaluate_cmd->add_option("--targets", ev_targets, "targets JSON")->required();
  evaluate_cmd->add_option("--mask", ev_mask, "mask CSV")->required();
  evaluate_cmd->add_option("--out", ev_out, "report JSON (default stdout)");
  evaluate_cmd->add_option("--rsse-epsilon", ev_eps, "opt-in guard for zero targets");

  std::string tg_pop, tg_mask, tg_out;
  std::vector<int> tg_orders{1, 2};
  std::vector<std::string> tg_features;
  auto* targets_cmd = app.add_subcommand("targets", "derive targets from the moments of a (sub)population");
  targets_cmd->add_option("--population", tg_pop, "population CSV")->required();
  targets_cmd->add_option("--mask", tg_mask, "mask CSV selecting the members (default: all)");
  targets_cmd->add_option("--orders", tg_orders, "moment orders")->delimiter(',')->capture_default_str();
  targets_cmd->add_option("--features", tg_features, "features (default: all)")->delimiter(',');
  targets_cmd->add_option("--out", tg_out, "targets JSON (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*select_cmd) return cmd_select(sc, out, err);
    if (*generate_cmd) return cmd_generate(spec_path, gen_out, out);
    if (*evaluate_cmd) return cmd_evaluate(ev_pop, ev_targets, ev_mask, ev_out, ev_eps, out);
    if (*targets_cmd) return cmd_targets(tg_pop, tg_mask, tg_orders, tg_features, tg_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace dsps::cli
