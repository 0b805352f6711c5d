#include "relosc/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "relosc/functional.hpp"
#include "relosc/hypotheses.hpp"
#include "relosc/instance_io.hpp"
#include "relosc/model.hpp"
#include "relosc/multiplicity.hpp"
#include "relosc/optimizer.hpp"
#include "relosc/svg.hpp"
#include "relosc/verify.hpp"
#include "relosc/wellposed.hpp"

namespace relosc {

std::vector<double> parse_lambda_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4)
    throw std::invalid_argument("grid spec must be lo:hi:count:{log|lin}");
  double lo = 0.0, hi = 0.0;
  long count = 0;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    count = std::stol(parts[2]);
  } catch (const std::exception&) {
    throw std::invalid_argument("grid spec must be lo:hi:count:{log|lin}");
  }
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw std::invalid_argument("grid spec needs 0 < lo <= hi and count >= 1");
  std::vector<double> grid;
  if (parts[3] == "log") {
    for (long k = 0; k < count; ++k)
      grid.push_back(count == 1 ? lo
                                : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) *
                                                              k / (count - 1)));
  } else if (parts[3] == "lin") {
    for (long k = 0; k < count; ++k)
      grid.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
  } else {
    throw std::invalid_argument("grid spacing must be log or lin");
  }
  return grid;
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kMathFailure = 1;
constexpr int kUsage = 2;

struct CliConfig {
  std::string instance_file;
  std::string preset_name;
  double lambda = 1.0;
  std::string grid_spec;
  int grid_n = 64;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 1;
  double tol_grad = 1e-8;
  double tol_value = 1e-8;
  double tol_dist = 1e-3;
  std::string input_path;  // verify: path CSV to certify
};

void add_common(CLI::App* sub, CliConfig& cfg, bool with_instance = true) {
  if (with_instance) {
    sub->add_option("--instance", cfg.instance_file, "instance description JSON file");
    sub->add_option("--preset", cfg.preset_name, "built-in instance name");
  }
  sub->add_option("--seed", cfg.seed, "random seed recorded in artifacts");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_option("--threads", cfg.threads, "worker thread cap")
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-grad", cfg.tol_grad, "projected gradient tolerance");
  sub->add_option("--tol-value", cfg.tol_value, "value tolerance for clustering");
  sub->add_option("--tol-dist", cfg.tol_dist, "distance tolerance factor for clustering");
}

json resolved_config(const std::string& subcommand, const CliConfig& cfg,
                     const std::optional<std::vector<double>>& grid = std::nullopt,
                     bool with_lambda = false) {
  json j;
  j["subcommand"] = subcommand;
  if (!cfg.preset_name.empty()) j["preset"] = cfg.preset_name;
  if (!cfg.instance_file.empty()) {
    j["instance_file"] = cfg.instance_file;
    std::ifstream in(cfg.instance_file);
    if (in) {
      try {
        j["instance"] = json::parse(in);
      } catch (const json::parse_error&) {
      }
    }
  }
  if (with_lambda) j["lambda"] = cfg.lambda;
  if (grid) j["lambda_grid"] = *grid;
  j["grid_n"] = cfg.grid_n;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["tol_grad"] = cfg.tol_grad;
  j["tol_value"] = cfg.tol_value;
  j["tol_dist"] = cfg.tol_dist;
  if (!cfg.input_path.empty()) j["path"] = cfg.input_path;
  return j;
}

MinimizeOptions options_from(const CliConfig& cfg) {
  MinimizeOptions opts;
  opts.N = cfg.grid_n;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  opts.grad_tol = cfg.tol_grad;
  opts.value_tol = cfg.tol_value;
  opts.dist_tol_factor = cfg.tol_dist;
  return opts;
}

ProblemInstance resolve_instance(const CliConfig& cfg) {
  if (!cfg.preset_name.empty() && !cfg.instance_file.empty())
    throw std::invalid_argument("--preset and --instance are mutually exclusive");
  if (!cfg.preset_name.empty()) return preset(cfg.preset_name);
  if (!cfg.instance_file.empty()) return load_instance_file(cfg.instance_file);
  throw std::invalid_argument("an instance is required: pass --preset or --instance");
}

fs::path ensure_out(const CliConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::invalid_argument("cannot create output directory " + cfg.out_dir);
  return dir;
}

void write_json_artifact(const fs::path& file, const json& j) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << j.dump(2) << '\n';
}

void write_path_artifact(const fs::path& file, const PeriodicPath& p,
                         const json& config) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << "# config: " << config.dump() << '\n';
  write_path_csv(os, p);
}

void write_svg_artifact(const fs::path& file, const std::string& svg,
                        const json& config) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << "<!-- config: " << config.dump() << " -->\n" << svg;
}

int cmd_check(const CliConfig& cfg) {
  const ProblemInstance inst = resolve_instance(cfg);
  const json config = resolved_config("check", cfg);
  const fs::path dir = ensure_out(cfg);

  json out;
  out["config"] = config;
  out["validation"] = validate_instance(inst, cfg.seed);
  out["report"] = check_all(inst, cfg.seed);
  write_json_artifact(dir / "check.json", out);

  const bool ok = out["validation"].empty() && out["report"]["failing"].empty();
  if (!ok)
    std::cerr << "check: failing hypotheses "
              << out["report"]["failing"].dump() << '\n';
  return ok ? kOk : kMathFailure;
}

int cmd_minimize(const CliConfig& cfg) {
  const ProblemInstance inst = resolve_instance(cfg);
  const json config = resolved_config("minimize", cfg, std::nullopt, true);
  const fs::path dir = ensure_out(cfg);
  const MinimizeOptions opts = options_from(cfg);

  std::vector<Minimum> results = multistart(inst, cfg.lambda, opts);
  const Minimum& best = results.front();

  // Final polish from the best start, streaming the iteration log.
  std::ofstream log(dir / "iterations.jsonl");
  MinimizeOptions polish = opts;
  polish.on_iteration = [&log](const IterationRecord& r) {
    json line = {{"iter", r.iter},
                 {"energy", r.energy},
                 {"grad_norm", r.grad_norm},
                 {"step", r.step}};
    log << line.dump() << '\n';
  };
  const Minimum polished = minimize(inst, cfg.lambda, best.path, polish);

  json out;
  out["config"] = config;
  out["energy"] = energy_to_json(polished.energy, cfg.lambda);
  out["converged"] = polished.converged;
  out["iterations"] = polished.iterations;
  out["projected_grad_norm"] = polished.projected_grad_norm;
  out["start_index"] = best.start_index;
  out["n_starts"] = results.size();
  write_json_artifact(dir / "minimize.json", out);
  write_path_artifact(dir / "path.csv", polished.path, config);

  if (!polished.converged) {
    std::cerr << "minimize: descent did not converge within the budget\n";
    return kMathFailure;
  }
  return kOk;
}

std::vector<double> grid_from(const CliConfig& cfg) {
  if (cfg.grid_spec.empty()) return default_lambda_grid();
  return parse_lambda_grid(cfg.grid_spec);
}

int cmd_scan(const CliConfig& cfg) {
  const ProblemInstance inst = resolve_instance(cfg);
  const std::vector<double> grid = grid_from(cfg);
  const json config = resolved_config("scan", cfg, grid);
  const fs::path dir = ensure_out(cfg);

  const ScanReport report = lambda_scan(inst, grid, options_from(cfg));
  {
    std::ofstream os(dir / "scan.csv");
    os << "# config: " << config.dump() << '\n';
    write_scan_csv(os, report);
  }
  json out;
  out["config"] = config;
  out["report"] = scan_to_json(report);
  write_json_artifact(dir / "scan.json", out);

  if (report.unbounded_evidence) {
    std::cerr << "scan: energies unbounded below, scan aborted\n";
    return kMathFailure;
  }
  return kOk;
}

int cmd_find_two(const CliConfig& cfg) {
  const ProblemInstance inst = resolve_instance(cfg);
  const json config = resolved_config("find-two", cfg);
  const fs::path dir = ensure_out(cfg);

  // Hypothesis screen recorded alongside the search; the search itself
  // handles pathological instances (unboundedness) defensively.
  const json hypotheses = check_all(inst, cfg.seed);

  const TwoMinimaResult two = find_two_minima(inst, options_from(cfg));
  json out;
  out["config"] = config;
  out["hypotheses"] = hypotheses;
  out["result"] = two_minima_to_json(two);

  {
    std::ofstream os(dir / "scan.csv");
    os << "# config: " << config.dump() << '\n';
    write_scan_csv(os, two.scan);
  }
  if (two.status == TwoMinimaResult::Status::found) {
    write_path_artifact(dir / "first.csv", two.cert_first.finest.path, config);
    write_path_artifact(dir / "second.csv", two.cert_second.finest.path, config);
  }
  if (inst.plateau_radius) {
    const PlateauResult plat = range_exclusion_check(inst, two, cfg.seed);
    out["range_exclusion"] = plateau_to_json(plat);
    write_json_artifact(dir / "find_two.json", out);
    if (two.status == TwoMinimaResult::Status::found && !plat.ok) {
      std::cerr << "find-two: range exclusion failed: " << plat.detail << '\n';
      return kMathFailure;
    }
  } else {
    write_json_artifact(dir / "find_two.json", out);
  }

  switch (two.status) {
    case TwoMinimaResult::Status::found:
    case TwoMinimaResult::Status::none_detected:
      return kOk;
    case TwoMinimaResult::Status::certification_failed:
      std::cerr << "find-two: representative failed certification\n";
      return kMathFailure;
    case TwoMinimaResult::Status::unbounded_detected:
      std::cerr << "find-two: functional unbounded below\n";
      return kMathFailure;
  }
  return kMathFailure;
}

int cmd_verify(const CliConfig& cfg) {
  const ProblemInstance inst = resolve_instance(cfg);
  const json config = resolved_config("verify", cfg, std::nullopt, true);
  const fs::path dir = ensure_out(cfg);

  const PeriodicPath loaded = read_path_csv_file(cfg.input_path);
  MinimizeOptions opts = options_from(cfg);
  opts.N = loaded.N();
  const Minimum polished = minimize(inst, cfg.lambda, loaded, opts);
  const Certificate cert = certify(polished, inst, cfg.lambda);

  json out;
  out["config"] = config;
  out["certificate"] = certificate_json(cert);
  write_json_artifact(dir / "verify.json", out);

  {
    const ResidualReport rep = el_residual(inst, cfg.lambda, cert.finest.path);
    std::ofstream os(dir / "residuals.csv");
    os << "# config: " << config.dump() << '\n';
    os << "t,residual_norm\n";
    os << std::setprecision(17);
    const double h = cert.finest.path.h();
    for (int k = 0; k < cert.finest.path.N(); ++k)
      os << k * h << ',' << rep.residuals.col(k).norm() << '\n';
  }

  if (!cert.passed) {
    std::cerr << "verify: certificate failed: " << cert.detail << '\n';
    return kMathFailure;
  }
  return kOk;
}

int cmd_shoot(const CliConfig& cfg) {
  const ProblemInstance inst = resolve_instance(cfg);
  const json config = resolved_config("shoot", cfg, std::nullopt, true);
  const fs::path dir = ensure_out(cfg);

  ShootingOptions opts;
  const auto starts = shooting_grid(inst.n, 2.0, 2.0, 3);
  const auto roots = solve_by_shooting(inst, cfg.lambda, starts, opts);

  json out;
  out["config"] = config;
  out["n_starts"] = starts.size();
  json list = json::array();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto& r = roots[i];
    json entry;
    entry["u0"] = std::vector<double>(r.u0.data(), r.u0.data() + r.u0.size());
    entry["w0"] = std::vector<double>(r.w0.data(), r.w0.data() + r.w0.size());
    entry["defect"] = r.defect;
    entry["newton_iterations"] = r.newton_iterations;
    list.push_back(std::move(entry));
    write_path_artifact(dir / ("shoot_root_" + std::to_string(i) + ".csv"), r.path,
                        config);
  }
  out["roots"] = std::move(list);
  write_json_artifact(dir / "shoot.json", out);
  return kOk;
}

void write_continuity_csv(const fs::path& file, const ContinuityReport& rep,
                          const json& config) {
  std::ofstream os(file);
  os << "# config: " << config.dump() << '\n';
  const int m = rep.x_hat.empty() ? 0 : static_cast<int>(rep.x_hat.front().size());
  os << "r";
  for (int i = 0; i < m; ++i) os << ",x_" << i + 1;
  os << ",j_value,lambda_hat,x_jump_ratio,j_jump_ratio\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < rep.r.size(); ++i) {
    os << rep.r[i];
    for (int c = 0; c < m; ++c) os << ',' << rep.x_hat[i][c];
    os << ',' << rep.j_value[i] << ',' << rep.lambda_hat[i];
    if (i + 1 < rep.r.size())
      os << ',' << rep.x_jump_ratio[i] << ',' << rep.j_jump_ratio[i];
    else
      os << ",,";
    os << '\n';
  }
}

int cmd_wellposed(const CliConfig& cfg) {
  const json config = resolved_config("wellposed", cfg);
  const fs::path dir = ensure_out(cfg);

  json out;
  out["config"] = config;
  std::vector<double> r_grid;
  for (int i = 0; i < 21; ++i) r_grid.push_back(0.25 + (4.0 - 0.25) * i / 20.0);

  for (const ScalarizedProblem& prob : {quadratic_lab(), symmetric_control_lab()}) {
    json lab;
    const AlphaBeta ab = alpha_beta(prob);
    lab["alpha"] = std::isfinite(ab.alpha) ? json(ab.alpha) : json("-inf");
    lab["beta"] = std::isfinite(ab.beta) ? json(ab.beta) : json("+inf");
    json levels = json::array();
    for (double r : {0.25, 1.0, 4.0})
      levels.push_back(levelresult_to_json(level_minimize(prob, r)));
    lab["levels"] = std::move(levels);
    const ContinuityReport cont = continuity_probe(prob, r_grid);
    lab["discontinuity_flag"] = cont.discontinuity_flag;
    const WellposednessReport probe = wellposedness_probe(prob, 1.0, 200, cfg.seed);
    lab["wellposedness"] = wellposedness_to_json(probe);
    write_continuity_csv(dir / ("continuity_" + prob.name + ".csv"), cont, config);
    out[prob.name] = std::move(lab);
  }
  write_json_artifact(dir / "wellposed.json", out);
  return kOk;
}

std::vector<std::vector<double>> read_csv_columns(const fs::path& file,
                                                  std::string* header) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open " + file.string());
  std::string line;
  do {
    if (!std::getline(is, line)) throw std::runtime_error("empty csv " + file.string());
  } while (!line.empty() && line[0] == '#');
  if (header) *header = line;
  std::vector<std::vector<double>> cols;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (cols.size() <= c) cols.resize(c + 1);
      if (!cell.empty()) cols[c].push_back(std::stod(cell));
      ++c;
    }
  }
  return cols;
}

int cmd_report(const CliConfig& cfg) {
  const json config = resolved_config("report", cfg);
  const fs::path dir = ensure_out(cfg);
  int rendered = 0;

  if (fs::exists(dir / "scan.csv")) {
    const auto cols = read_csv_columns(dir / "scan.csv", nullptr);
    if (cols.size() >= 2 && !cols[0].empty()) {
      PlotSeries s{"best energy", cols[0], cols[1]};
      PlotOptions opts;
      opts.title = "best energy vs lambda";
      opts.x_label = "lambda";
      opts.y_label = "energy";
      opts.log_x = true;
      write_svg_artifact(dir / "energy_vs_lambda.svg", line_plot_svg({s}, opts),
                         config);
      ++rendered;
    }
  }

  std::vector<PlotSeries> path_series;
  for (const char* name : {"path.csv", "first.csv", "second.csv"}) {
    if (!fs::exists(dir / name)) continue;
    const auto cols = read_csv_columns(dir / name, nullptr);
    for (std::size_t c = 1; c < cols.size(); ++c) {
      std::string label = std::string(name);
      label.resize(label.size() - 4);  // drop .csv
      if (cols.size() > 2) label += "/u_" + std::to_string(c);
      path_series.push_back(PlotSeries{std::move(label), cols[0], cols[c]});
    }
  }
  if (!path_series.empty()) {
    PlotOptions opts;
    opts.title = "paths";
    opts.x_label = "t";
    opts.y_label = "u";
    write_svg_artifact(dir / "paths.svg", line_plot_svg(path_series, opts), config);
    ++rendered;
  }

  if (fs::exists(dir / "residuals.csv")) {
    const auto cols = read_csv_columns(dir / "residuals.csv", nullptr);
    if (cols.size() >= 2 && !cols[1].empty()) {
      PlotOptions opts;
      opts.title = "residual distribution";
      opts.x_label = "residual norm";
      opts.y_label = "count";
      write_svg_artifact(dir / "residuals.svg", histogram_svg(cols[1], 24, opts),
                         config);
      ++rendered;
    }
  }

  if (rendered == 0) {
    std::cerr << "report: no prior artifacts found in " << dir.string() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"periodic relativistic oscillator toolkit"};
  app.require_subcommand(1);
  CliConfig cfg;

  CLI::App* check = app.add_subcommand("check", "run the hypothesis checker");
  add_common(check, cfg);

  CLI::App* minimize_cmd =
      app.add_subcommand("minimize", "multistart minimization at one lambda");
  add_common(minimize_cmd, cfg);
  minimize_cmd->add_option("--lambda", cfg.lambda, "perturbation weight");
  minimize_cmd->add_option("--grid-n", cfg.grid_n, "discretization nodes")
      ->check(CLI::Range(4, 100000));

  CLI::App* scan = app.add_subcommand("scan", "multiplicity scan over a lambda grid");
  add_common(scan, cfg);
  scan->add_option("--lambda-grid", cfg.grid_spec, "grid spec lo:hi:count:{log|lin}");
  scan->add_option("--grid-n", cfg.grid_n, "discretization nodes")
      ->check(CLI::Range(4, 100000));

  CLI::App* findtwo =
      app.add_subcommand("find-two", "locate and certify two global minimizers");
  add_common(findtwo, cfg);
  findtwo->add_option("--grid-n", cfg.grid_n, "discretization nodes")
      ->check(CLI::Range(4, 100000));

  CLI::App* verify = app.add_subcommand("verify", "certify a path from a CSV file");
  add_common(verify, cfg);
  verify->add_option("path", cfg.input_path, "path CSV to certify")->required();
  verify->add_option("--lambda", cfg.lambda, "perturbation weight");

  CLI::App* shoot_cmd = app.add_subcommand("shoot", "independent shooting solver");
  add_common(shoot_cmd, cfg);
  shoot_cmd->add_option("--lambda", cfg.lambda, "perturbation weight");

  CLI::App* wellposed =
      app.add_subcommand("wellposed", "finite-dimensional scalarization laboratory");
  add_common(wellposed, cfg, /*with_instance=*/false);

  CLI::App* report = app.add_subcommand("report", "render SVG plots from artifacts");
  add_common(report, cfg, /*with_instance=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(cfg);
    if (minimize_cmd->parsed()) return cmd_minimize(cfg);
    if (scan->parsed()) return cmd_scan(cfg);
    if (findtwo->parsed()) return cmd_find_two(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (shoot_cmd->parsed()) return cmd_shoot(cfg);
    if (wellposed->parsed()) return cmd_wellposed(cfg);
    if (report->parsed()) return cmd_report(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMathFailure;
  }
  return kUsage;
}

}  // namespace relosc
