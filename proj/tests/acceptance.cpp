// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failures. argv[1] must point at the CLI
// binary (the estimator criteria and the determinism criterion run it).
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "upress/analysis.hpp"
#include "upress/artifacts.hpp"
#include "upress/measures.hpp"
#include "upress/oracle.hpp"
#include "upress/rng.hpp"

using namespace upress;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::vector<std::pair<int, std::string>> g_lines;

void report(int criterion, bool pass, const std::string& detail) {
  std::ostringstream line;
  line << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail;
  g_lines.emplace_back(criterion, line.str());
  if (!pass) ++g_failures;
}

double log_lambda_u() { return std::log(0.5 * (3.0 + std::sqrt(5.0))); }

struct CliRun {
  int exit_code = -1;
  json summary;
  double seconds = 0.0;
};

CliRun run_cli(const std::string& binary, const std::string& command, const fs::path& config,
               const fs::path& workdir, const std::string& tag, const std::string& extra = "") {
  const fs::path out_json = workdir / (tag + "_stdout.json");
  const fs::path err_txt = workdir / (tag + "_stderr.txt");
  std::ostringstream cmd;
  cmd << '"' << binary << "\" " << command << " \"" << config.string() << "\" " << extra
      << " > \"" << out_json.string() << "\" 2> \"" << err_txt.string() << '"';
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.str().c_str());
  const auto t1 = std::chrono::steady_clock::now();
  CliRun run;
  run.seconds = std::chrono::duration<double>(t1 - t0).count();
  run.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out_json);
  if (in) {
    try {
      in >> run.summary;
    } catch (...) {
    }
  }
  return run;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string estimator_config(const std::string& potential_json, int n_max, double delta,
                             const std::string& eps_list, const std::string& out_dir) {
  std::ostringstream os;
  os << R"({
  "system": {"family": "linear_times_rotation", "matrix": [[2,1],[1,1]], "rotation_angle": 0.33},
  "potentials": [)"
     << potential_json << R"(],
  "estimator": {"delta": )"
     << delta << R"(, "eps_list": )" << eps_list << R"(, "n_min": 4, "n_max": )" << n_max
     << R"(, "offsets": 4, "base_points": 3, "seed": 20240612},
  "output": {"directory": ")"
     << out_dir << R"("}
})";
  return os.str();
}

SeparationParams battery_params() {
  SeparationParams p;
  p.delta = 0.2;
  p.eps_list = {0.1, 0.05, 0.025};
  p.n_min = 4;
  p.n_max = 12;
  p.offsets = 4;
  p.base_point_count = 3;
  p.seed = 11;
  return p;
}

std::vector<Potential> battery() {
  return {
      Potential::constant(0.0),
      Potential::constant(0.3),
      Potential::constant(-0.25),
      Potential::trig({TrigTerm{{1, 0, 0}, 0.5, 0.0}}),
      Potential::trig({TrigTerm{{1, 0, 0}, 0.0, 0.2}, TrigTerm{{0, 1, 0}, 0.1, 0.0}}),
      Potential::geometric(),
  };
}

const SystemSpec& rotation_system() {
  static const SystemSpec sys = SystemSpec::linear_times_rotation(0.33);
  return sys;
}

void criterion_1_and_2_and_9(const std::string& binary, const fs::path& work) {
  // 1: unstable entropy of the rotation extension via the CLI estimator.
  const fs::path cfg1 = work / "estimate_zero.json";
  write_text_file(cfg1.string(),
                  estimator_config(R"({"kind": "constant", "value": 0.0})", 14, 0.2,
                                   "[0.1, 0.05, 0.025]", (work / "out1").string()));
  const CliRun r1 = run_cli(binary, "estimate", cfg1, work, "crit1");
  {
    const double target = log_lambda_u();
    bool pass = r1.exit_code == 0 && r1.summary.contains("value");
    double value = 0.0;
    if (pass) {
      value = r1.summary["value"].get<double>();
      pass = std::fabs(value - target) <= 0.05 * target && r1.summary["converged"].get<bool>() &&
             r1.seconds < 60.0;
    }
    std::ostringstream detail;
    detail << "estimate(phi=0) = " << value << " vs log((3+sqrt5)/2) = " << target << ", "
           << r1.seconds << " s";
    report(1, pass, detail.str());
  }

  // 2: the geometric potential has zero pressure.
  const fs::path cfg2 = work / "estimate_geometric.json";
  write_text_file(cfg2.string(), estimator_config(R"({"kind": "geometric"})", 14, 0.2,
                                                  "[0.1, 0.05, 0.025]", (work / "out2").string()));
  const CliRun r2 = run_cli(binary, "estimate", cfg2, work, "crit2");
  {
    bool pass = r2.exit_code == 0 && r2.summary.contains("value");
    double value = 0.0;
    if (pass) {
      value = r2.summary["value"].get<double>();
      pass = std::fabs(value) <= 0.05 && r2.seconds < 60.0;
    }
    std::ostringstream detail;
    detail << "estimate(phi_u) = " << value << " (target 0), " << r2.seconds << " s";
    report(2, pass, detail.str());
  }

  // 9: byte-identical artifacts across reruns with the same config and seed.
  {
    const std::string redirect = "--output-dir \"" + (work / "out9").string() + '"';
    const CliRun r9 = run_cli(binary, "estimate", cfg1, work, "crit9", redirect);
    const std::string a = read_file(work / "out1" / "grid.csv");
    const std::string b = read_file(work / "out9" / "grid.csv");
    const bool pass = r9.exit_code == 0 && !a.empty() && a == b;
    std::ostringstream detail;
    detail << "grid.csv byte-identical across reruns (" << a.size() << " bytes)";
    report(9, pass, detail.str());
  }
}

void criterion_3_and_4(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  const PropertyReport rep = property_suite(rotation_system(), battery(), battery_params());

  bool exact_ok = true, stat_ok = true, cob_ok = true;
  std::ostringstream failures;
  for (const PropertyCheck& c : rep.checks) {
    if (!c.applicable) continue;
    if (!c.pass) failures << ' ' << c.name;
    if (c.exact && !c.pass) exact_ok = false;
    if (!c.exact && !c.pass) stat_ok = false;
    if (c.name.rfind("p6_", 0) == 0 && !c.pass) cob_ok = false;
  }

  // one-sided derivative symmetry, exact on the shared value grid
  const std::vector<double> grid{-0.1, -0.05, 0.0, 0.05, 0.1};
  const Potential psi = Potential::trig({TrigTerm{{1, 0, 0}, 0.5, 0.0}});
  const DerivativeProbe plus =
      derivative_probe(rotation_system(), Potential::constant(0.0), psi, grid, battery_params());
  const DerivativeProbe minus = derivative_probe(rotation_system(), Potential::constant(0.0),
                                                 psi.scaled(-1.0), grid, battery_params());
  const double dsym = std::fabs(plus.d_minus - (-minus.d_plus));
  const auto t1 = std::chrono::steady_clock::now();
  const double secs = std::chrono::duration<double>(t1 - t0).count();

  {
    const bool pass = exact_ok && stat_ok && dsym <= 1e-12 && secs < 600.0;
    std::ostringstream detail;
    detail << "property battery (" << rep.checks.size() << " checks"
           << (failures.str().empty() ? "" : ", failing:" + failures.str())
           << "), |d-(psi)+d+(-psi)| = " << dsym << ", " << secs << " s";
    report(3, pass, detail.str());
  }
  report(4, cob_ok, "coboundary invariance: telescoping exact + rate bound 2||psi||/n_max");
}

void criterion_5(const fs::path&) {
  const SystemSpec& sys = rotation_system();
  const SeparationParams params = battery_params();
  const std::vector<Potential> pots = battery();
  const MeasureEstimate srb = MeasureEstimate::empirical_srb(sys, 100000, 1000, params.seed);

  bool pass = true;
  std::ostringstream detail;
  std::vector<double> values;
  for (std::size_t i = 0; i < pots.size(); ++i) {
    const PressureEstimate est = estimate_pressure(sys, pots[i], params);
    values.push_back(est.value);
    const double gap = variational_gap(sys, pots[i], srb, est);
    if (gap < -0.06) pass = false;
    // equilibrium certificates for 0, constants, and phi_u
    const bool distinguished = pots[i].kind() == Potential::Kind::Constant ||
                               pots[i].kind() == Potential::Kind::Geometric;
    if (distinguished && std::fabs(gap) > 0.06) pass = false;
    detail << pots[i].label() << ":gap=" << gap << ' ';
  }

  const DominanceReport srb_dom = pressure_dominates(sys, srb, pots, values);
  if (srb_dom.min_slack < -0.06) pass = false;
  for (int period = 1; period <= 3; ++period) {
    const MeasureEstimate pm =
        MeasureEstimate::point_mass(sys, TorusPoint::wrapped3(0, 0, 0), period);
    const DominanceReport rep = pressure_dominates(sys, pm, pots, values);
    if (rep.min_slack < -0.06) pass = false;
  }
  report(5, pass, "variational gaps and dominance slacks: " + detail.str());
}

void criterion_6(const fs::path&) {
  SeparationParams p = battery_params();
  const PressureEstimate big = estimate_pressure(rotation_system(), Potential::constant(0.0), p);
  p.delta = 0.1;
  const PressureEstimate small = estimate_pressure(rotation_system(), Potential::constant(0.0), p);
  const double diff = std::fabs(big.value - small.value);
  const double allowed = big.spread + small.spread + 0.05;
  std::ostringstream detail;
  detail << "P at delta 0.2 vs 0.1: |" << big.value << " - " << small.value << "| = " << diff
         << " <= " << allowed;
  report(6, diff <= allowed, detail.str());
}

void criterion_7(const fs::path&) {
  bool pass = true;
  Matrix full2 = Matrix::zero(2);
  full2(0, 0) = full2(0, 1) = full2(1, 0) = full2(1, 1) = 1.0;
  const double p_full = sft_pressure({full2, {0.0, 0.0}});
  if (std::fabs(p_full - std::log(2.0)) > 1e-10) pass = false;

  Matrix gm = Matrix::zero(2);
  gm(0, 0) = gm(0, 1) = gm(1, 0) = 1.0;
  const double p_gm = sft_pressure({gm, {0.0, 0.0}});
  if (std::fabs(p_gm - std::log(0.5 * (1.0 + std::sqrt(5.0)))) > 1e-10) pass = false;

  SplitMix64 rng(71);
  double min_slack = 1e300;
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_u64() % 6);
    std::vector<double> pv(static_cast<std::size_t>(k)), av(static_cast<std::size_t>(k));
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      pv[static_cast<std::size_t>(i)] = rng.next_unit();
      av[static_cast<std::size_t>(i)] = rng.next_unit() * 8 - 4;
      s += pv[static_cast<std::size_t>(i)];
    }
    if (s == 0.0) continue;
    min_slack = std::min(min_slack, convexity_slack(pv, av));
  }
  if (min_slack < -1e-12) pass = false;

  std::ostringstream detail;
  detail << "sft(full 2-shift) = " << p_full << ", sft(golden mean) = " << p_gm
         << ", min convexity slack over 10^4 trials = " << min_slack;
  report(7, pass, detail.str());
}

void criterion_8(const fs::path&) {
  const SystemSpec& sys = rotation_system();
  const LeafSegment leaf = trace_leaf(sys, TorusPoint::wrapped3(0, 0, 0), 0.2, 1e-3);
  const double lambda = 0.5 * (3.0 + std::sqrt(5.0));

  bool pass = true;
  double worst_rel = 0.0;
  for (const double sigma : {0.01, 0.05, 0.15}) {
    for (int n = 1; n <= 12; ++n) {
      const double expected = sigma * std::pow(lambda, n - 1);
      if (expected >= 0.5) break;
      const double got = dun_distance(sys, leaf, -sigma / 2, sigma / 2, n);
      worst_rel = std::max(worst_rel, std::fabs(got - expected) / expected);
    }
  }
  if (worst_rel > 1e-10) pass = false;

  SplitMix64 rng(81);
  double worst_ratio = 1.0;
  for (int i = 0; i < 500; ++i) {
    const double s1 = (rng.next_unit() * 2 - 1) * 0.2;
    const double s2 = (rng.next_unit() * 2 - 1) * 0.2;
    if (std::fabs(s1 - s2) < 1e-9) continue;
    const double du = du_distance(leaf, s1, s2);
    const double d = torus_distance(leaf.torus_point_at(s1), leaf.torus_point_at(s2));
    if (d > du * (1 + 1e-9)) pass = false;
    worst_ratio = std::max(worst_ratio, du / d);
  }
  if (worst_ratio > 1.2) pass = false;

  std::ostringstream detail;
  detail << "Bowen closed form rel err = " << worst_rel << ", measured d^u/d in [1, "
         << worst_ratio << "]";
  report(8, pass, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-upress-binary>\n";
    return 127;
  }
  const std::string binary = argv[1];
  const fs::path work = fs::path("acceptance_work");
  fs::create_directories(work);

  criterion_1_and_2_and_9(binary, work);
  criterion_3_and_4(work);
  criterion_5(work);
  criterion_6(work);
  criterion_7(work);
  criterion_8(work);

  std::sort(g_lines.begin(), g_lines.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [num, line] : g_lines) std::cout << line << std::endl;
  if (g_failures == 0)
    std::cout << "all criteria passed" << std::endl;
  else
    std::cout << g_failures << " criteria failed" << std::endl;
  return g_failures;
}
