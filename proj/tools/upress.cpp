// Command-line front end: config-driven runs of the pressure estimator, the
// property battery, variational checks, derivative probes, the transfer-matrix
// oracle, and leaf dumps.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "upress/analysis.hpp"
#include "upress/artifacts.hpp"
#include "upress/config.hpp"
#include "upress/measures.hpp"
#include "upress/oracle.hpp"
#include "upress/rng.hpp"
#include "upress/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace upress;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitNotConverged = 2;

struct Cli {
  std::string config_path;
  std::string output_dir_override;
  int threads = 0;
  std::string command;
};

json meta(const RunConfig& cfg) {
  return json{{"config_hash", cfg.config_hash}, {"version", kVersion}};
}

json estimate_json(const PressureEstimate& est, const RunConfig& cfg) {
  json rates = json::array();
  for (const RateFit& f : est.rates)
    rates.push_back(json{{"base_index", f.base_index},
                         {"eps", f.eps},
                         {"rate_sep", f.rate_sep},
                         {"rate_span", f.rate_span},
                         {"residual_sep", f.residual_sep},
                         {"residual_span", f.residual_span}});
  json j = meta(cfg);
  j["value"] = est.value;
  j["bracket"] = {est.bracket[0], est.bracket[1]};
  j["spread"] = est.spread;
  j["converged"] = est.converged;
  j["rates"] = rates;
  return j;
}

fs::path prepare_output_dir(const RunConfig& cfg, const Cli& cli) {
  std::string dir = cfg.output.directory;
  if (const char* env = std::getenv("UPRESS_OUTPUT_DIR"); env && *env) dir = env;
  if (!cli.output_dir_override.empty()) dir = cli.output_dir_override;
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

const Potential& potential_at(const RunConfig& cfg, std::size_t i, const char* what) {
  if (i >= cfg.potentials.size())
    throw ConfigError(std::string("config: ") + what + ": potential index " + std::to_string(i) +
                      " out of range (have " + std::to_string(cfg.potentials.size()) + ")");
  return cfg.potentials[i];
}

int cmd_estimate(RunConfig& cfg, const Cli& cli) {
  const SystemSpec& system = cfg.require_system();
  const Potential& phi = potential_at(cfg, 0, "estimate");
  const fs::path out = prepare_output_dir(cfg, cli);

  const PressureEstimate est = estimate_pressure(system, phi, cfg.estimator);
  if (cfg.output.csv) write_text_file((out / "grid.csv").string(), grid_csv(est, cfg.config_hash, kVersion));
  json summary = estimate_json(est, cfg);
  summary["command"] = "estimate";
  summary["potential"] = phi.label();
  if (cfg.output.json) write_text_file((out / "summary.json").string(), summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return est.converged ? kExitOk : kExitNotConverged;
}

int cmd_properties(RunConfig& cfg, const Cli& cli) {
  const SystemSpec& system = cfg.require_system();
  if (cfg.potentials.size() < 2)
    throw ConfigError("config: /potentials: properties needs a battery of >= 2 potentials");
  const fs::path out = prepare_output_dir(cfg, cli);

  const PropertyReport report = property_suite(system, cfg.potentials, cfg.estimator);
  json checks = json::array();
  for (const PropertyCheck& c : report.checks)
    checks.push_back(json{{"name", c.name},
                          {"detail", c.detail},
                          {"applicable", c.applicable},
                          {"exact", c.exact},
                          {"slack", c.slack},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
  json summary = meta(cfg);
  summary["command"] = "properties";
  summary["battery"] = report.battery_labels;
  summary["pressure_values"] = report.pressure_values;
  summary["spreads"] = report.spreads;
  summary["checks"] = checks;
  summary["all_pass"] = report.all_pass;
  summary["converged"] = report.all_converged;
  if (cfg.output.json) write_text_file((out / "properties.json").string(), summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return report.all_converged ? kExitOk : kExitNotConverged;
}

int cmd_varcheck(RunConfig& cfg, const Cli& cli) {
  const SystemSpec& system = cfg.require_system();
  if (cfg.potentials.empty())
    throw ConfigError("config: /potentials: varcheck needs at least one potential");
  const fs::path out = prepare_output_dir(cfg, cli);

  const MeasureEstimate srb = MeasureEstimate::empirical_srb(
      system, cfg.measure.orbit_length, cfg.measure.burn_in, cfg.estimator.seed);

  bool converged = true;
  std::vector<double> pressures;
  json rows = json::array();
  for (const Potential& phi : cfg.potentials) {
    const PressureEstimate est = estimate_pressure(system, phi, cfg.estimator);
    converged = converged && est.converged;
    pressures.push_back(est.value);
    const double gap = variational_gap(system, phi, srb, est);
    rows.push_back(json{{"potential", phi.label()},
                        {"pressure", est.value},
                        {"spread", est.spread},
                        {"integral_srb", srb.integrate(system, phi)},
                        {"gap", gap}});
  }

  const DominanceReport srb_dom = pressure_dominates(system, srb, cfg.potentials, pressures);
  json dominance = json::array();
  auto dom_json = [](const std::string& name, const MeasureEstimate& mu,
                     const DominanceReport& rep) {
    json rows = json::array();
    for (const DominanceRow& r : rep.rows)
      rows.push_back(json{{"potential", r.potential},
                          {"integral", r.integral},
                          {"pressure", r.pressure},
                          {"slack", r.slack}});
    return json{{"measure", name},
                {"kind", mu.kind() == MeasureEstimate::Kind::PointMass ? "point_mass"
                                                                       : "empirical_srb"},
                {"hu", mu.hu()},
                {"hu_method", hu_method_name(mu.hu_method())},
                {"bound_only", mu.bound_only()},
                {"min_slack", rep.min_slack},
                {"rows", rows}};
  };
  dominance.push_back(dom_json("empirical_srb", srb, srb_dom));
  for (int period : {1, 2, 3}) {
    try {
      const MeasureEstimate pm = MeasureEstimate::point_mass(
          system, system.dim() == 2 ? TorusPoint::wrapped2(0, 0) : TorusPoint::wrapped3(0, 0, 0),
          period);
      dominance.push_back(
          dom_json("point_mass_period_" + std::to_string(period), pm,
                   pressure_dominates(system, pm, cfg.potentials, pressures)));
    } catch (const std::exception&) {
      // period without orbits: skip
    }
  }

  // Scan t -> P(t*phi_u) - integral of t*phi_u dSRB; the minimum sits at the
  // Gibbs parameter t = 1 and equals h^u there.
  json d2 = json::object();
  {
    const Potential phi_u = Potential::geometric();
    double min_slack = std::numeric_limits<double>::infinity();
    double slack_at_1 = 0.0;
    json scan = json::array();
    for (int k = 0; k <= 8; ++k) {
      const double t = 0.25 * k;
      const PressureEstimate est = estimate_pressure(system, phi_u.scaled(t), cfg.estimator);
      converged = converged && est.converged;
      const double slack = est.value - srb.integrate(system, phi_u.scaled(t));
      if (t == 1.0) slack_at_1 = slack;
      min_slack = std::min(min_slack, slack);
      scan.push_back(json{{"t", t}, {"slack", slack}});
    }
    d2 = json{{"scan", scan},
              {"min_slack", min_slack},
              {"slack_at_t1", slack_at_1},
              {"hu_srb", srb.hu()}};
  }

  json summary = meta(cfg);
  summary["command"] = "varcheck";
  summary["measure"] = json{{"kind", "empirical_srb"},
                            {"hu", srb.hu()},
                            {"hu_method", hu_method_name(srb.hu_method())},
                            {"bound_only", srb.bound_only()}};
  summary["potentials"] = rows;
  summary["dominance"] = dominance;
  summary["entropy_defect_scan"] = d2;
  summary["converged"] = converged;
  if (cfg.output.json) write_text_file((out / "varcheck.json").string(), summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_derivative(RunConfig& cfg, const Cli& cli) {
  const SystemSpec& system = cfg.require_system();
  const Potential& base = potential_at(cfg, static_cast<std::size_t>(cfg.derivative.base_index),
                                       "/derivative/base");
  const Potential& dir = potential_at(
      cfg, static_cast<std::size_t>(cfg.derivative.direction_index), "/derivative/direction");
  const fs::path out = prepare_output_dir(cfg, cli);

  std::vector<double> grid =
      cfg.derivative.t_grid.empty() ? default_t_grid() : cfg.derivative.t_grid;
  const MeasureEstimate srb = MeasureEstimate::empirical_srb(
      system, cfg.measure.orbit_length, cfg.measure.burn_in, cfg.estimator.seed);
  const DerivativeProbe probe = derivative_probe(system, base, dir, grid, cfg.estimator, &srb);

  if (cfg.output.csv)
    write_text_file((out / "derivative.csv").string(),
                    derivative_csv(probe, cfg.config_hash, kVersion));
  json summary = meta(cfg);
  summary["command"] = "derivative";
  summary["base"] = base.label();
  summary["direction"] = dir.label();
  summary["d_plus"] = probe.d_plus;
  summary["d_minus"] = probe.d_minus;
  summary["tolerance"] = probe.tolerance;
  summary["gateaux_flag"] = probe.gateaux_flag;
  summary["convexity_violation"] = probe.convexity_violation;
  if (probe.equilibrium_match) summary["equilibrium_match"] = *probe.equilibrium_match;
  summary["converged"] = probe.all_converged;
  if (cfg.output.json) write_text_file((out / "derivative.json").string(), summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return probe.all_converged ? kExitOk : kExitNotConverged;
}

int cmd_oracle(RunConfig& cfg, const Cli& cli) {
  if (!cfg.sft) throw ConfigError("config: missing \"oracle\" block");
  const fs::path out = prepare_output_dir(cfg, cli);
  const double pressure = sft_pressure(*cfg.sft);

  json matrix = json::array();
  const int k = cfg.sft->transition.size;
  for (int i = 0; i < k; ++i) {
    json row = json::array();
    for (int j = 0; j < k; ++j) row.push_back(cfg.sft->transition(i, j));
    matrix.push_back(row);
  }
  json summary = meta(cfg);
  summary["command"] = "oracle";
  summary["matrix"] = matrix;
  summary["potential"] = cfg.sft->site_potential;
  summary["pressure"] = pressure;
  if (cfg.output.json) write_text_file((out / "oracle.json").string(), summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

int cmd_leafdump(RunConfig& cfg, const Cli& cli) {
  const SystemSpec& system = cfg.require_system();
  const fs::path out = prepare_output_dir(cfg, cli);

  TorusPoint base;
  if (!cfg.estimator.base_points.empty()) {
    base = cfg.estimator.base_points.front();
  } else {
    const auto q = quasi_random_point(cfg.estimator.seed, 0, system.dim());
    base = TorusPoint{{q[0], q[1], q[2]}, system.dim()};
  }
  const LeafSegment leaf = trace_leaf(system, base, cfg.estimator.delta,
                                      cfg.estimator.resolution, cfg.estimator.leaf_depth);
  const std::string stamp =
      "<!-- config_hash=" + cfg.config_hash + " version=" + kVersion + " -->\n";
  write_text_file((out / "leaf.svg").string(), stamp + leaf_svg(leaf));

  json summary = meta(cfg);
  summary["command"] = "leafdump";
  summary["delta"] = leaf.delta;
  summary["samples"] = leaf.s.size();
  summary["construction_depth"] = leaf.construction_depth;
  summary["svg"] = (out / "leaf.svg").string();
  if (cfg.output.json) write_text_file((out / "leafdump.json").string(), summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unstable-pressure toolkit for partially hyperbolic torus maps"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Cli cli;
  const std::vector<std::string> commands = {"estimate", "properties", "varcheck",
                                             "derivative", "oracle",     "leafdump"};
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", cli.config_path, "JSON run configuration")->required();
    sub->add_option("--threads", cli.threads, "cap worker thread count");
    sub->add_option("--output-dir", cli.output_dir_override, "override the output directory");
    sub->callback([&cli, name]() { cli.command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config_file(cli.config_path);
    if (cli.threads > 0) cfg.estimator.threads = cli.threads;
    if (cli.command == "estimate") return cmd_estimate(cfg, cli);
    if (cli.command == "properties") return cmd_properties(cfg, cli);
    if (cli.command == "varcheck") return cmd_varcheck(cfg, cli);
    if (cli.command == "derivative") return cmd_derivative(cfg, cli);
    if (cli.command == "oracle") return cmd_oracle(cfg, cli);
    if (cli.command == "leafdump") return cmd_leafdump(cfg, cli);
    std::cerr << "unknown command\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}
