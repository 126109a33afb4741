// aircomplex: command line front end for the analysis engine.
//
//   aircomplex analyze --log F [--min-h 5 --max-h 33 --min-v 1000 --max-v 3000
//                       --complexity 60 --dt 10 --exclude CS1,CS2] --out DIR
//   aircomplex sensitivity --log F --n 1024 --bounds thresh_h=15:75,complexity=40:100 --out DIR
//   aircomplex serve [--data DIR] [--bind HOST:PORT] [--ui DIR]

#include <aircomplex/aircomplex.hpp>
#include <aircomplex/service.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace aircomplex;

namespace {

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << data;
}

struct ParamOptions {
  double min_h = 5.0;
  double max_h = 33.0;
  double min_v = 1000.0;
  double max_v = 3000.0;
  std::optional<double> safety_h;
  std::optional<double> safety_v;
  double complexity = 60.0;
  double dt = 10.0;
  std::vector<std::string> exclude;
  std::vector<double> weights;

  void attach(CLI::App* app) {
    app->add_option("--min-h", min_h, "Minimal horizontal distance (NM)")->capture_default_str();
    app->add_option("--max-h", max_h, "Maximal horizontal distance threshold (NM)")->capture_default_str();
    app->add_option("--min-v", min_v, "Minimal vertical distance (ft)")->capture_default_str();
    app->add_option("--max-v", max_v, "Maximal vertical distance threshold (ft)")->capture_default_str();
    app->add_option("--safety-h", safety_h, "Horizontal safety distance H (NM); defaults to --min-h");
    app->add_option("--safety-v", safety_v, "Vertical safety distance V (ft); defaults to --min-v");
    app->add_option("--complexity", complexity, "Complexity threshold (%)")->capture_default_str();
    app->add_option("--dt", dt, "Resampling step (s)")->capture_default_str();
    app->add_option("--exclude", exclude, "Callsigns to remove (what-if)")->delimiter(',');
    app->add_option("--weights", weights, "Indicator weights strength,cc,nnd")->delimiter(',')->expected(3);
  }

  RunRequest request() const {
    RunRequest r;
    auto& w = r.params.weights;
    w.min_h_nm = min_h;
    w.thresh_h_nm = max_h;
    w.min_v_ft = min_v;
    w.thresh_v_ft = max_v;
    w.safety_h_nm = safety_h.value_or(min_h);
    w.safety_v_ft = safety_v.value_or(min_v);
    r.params.complexity_thresh_pct = complexity;
    r.params.dt_s = dt;
    r.exclude = exclude;
    if (!weights.empty()) r.indicator_weights = IndicatorWeights{weights[0], weights[1], weights[2]};
    return r;
  }
};

std::vector<ParameterBounds> parse_bounds(const std::string& spec) {
  std::vector<ParameterBounds> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    const auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos)
      throw InvalidBounds("bounds must look like name=lo:hi, got '" + item + "'");
    out.push_back({sweep_parameter_from_string(item.substr(0, eq)), std::stod(item.substr(eq + 1, colon - eq - 1)),
                   std::stod(item.substr(colon + 1))});
  }
  return out;
}

int run_analyze(const fs::path& log_path, const ParamOptions& opts, const fs::path& out_dir) {
  const auto log = parse_log(read_all(log_path));
  const auto request = opts.request();
  const auto t0 = std::chrono::steady_clock::now();
  const auto run = run_analysis(log, request);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(out_dir);
  write_all(out_dir / "frames.json", frames_json(run).dump() + "\n");
  write_all(out_dir / "communities.json", communities_json(run.archive).dump(2) + "\n");
  write_all(out_dir / "heatmap.json", heatmap_json(run.heatmap).dump() + "\n");
  write_all(out_dir / "summary.json", export_summary_file(run.summary));

  std::cout << "frames: " << run.frames.size() << "  aircraft: " << log.aircraft_count()
            << "  complex communities: " << run.archive.size() << "  (" << elapsed << " s)\n";
  for (const auto& rec : run.archive) {
    std::cout << "  " << rec.name() << "  " << rec.appearance << "s -> " << rec.disappearance.value_or(rec.appearance)
              << "s  members:";
    for (const auto& cs : rec.all_members()) std::cout << ' ' << cs;
    std::cout << '\n';
  }
  std::cout << "wrote " << out_dir.string() << "/{frames,communities,heatmap,summary}.json\n";
  return 0;
}

int run_sensitivity(const fs::path& log_path, const ParamOptions& opts, std::size_t n, const std::string& bounds,
                    unsigned threads, const fs::path& out_dir) {
  const auto log = parse_log(read_all(log_path));
  SweepConfig cfg;
  cfg.fixed = opts.request();
  cfg.base_samples = n;
  cfg.threads = threads;
  if (!bounds.empty()) cfg.bounds = parse_bounds(bounds);

  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = saltelli_sample(cfg);
  const auto outputs = evaluate_samples(rows, cfg, log);
  const auto result = sobol_indices(outputs, cfg);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(out_dir);
  write_all(out_dir / "sobol.json", sobol_json(result).dump(2) + "\n");
  write_all(out_dir / "samples.csv", samples_csv(rows, outputs, cfg));

  std::cout << rows.rows() << " samples in " << elapsed << " s (empty archives: " << outputs.empty_rows << ")\n";
  for (std::size_t o = 0; o < result.outputs.size(); ++o) {
    std::cout << "  " << to_string(result.outputs[o]) << ':';
    if (result.indices[o].degenerate) {
      std::cout << " degenerate variance\n";
      continue;
    }
    for (std::size_t j = 0; j < result.parameters.size(); ++j) {
      std::cout << "  " << to_string(result.parameters[j]) << " S1=" << result.indices[o].first[j]
                << " ST=" << result.indices[o].total[j];
    }
    std::cout << '\n';
  }
  std::cout << "wrote " << out_dir.string() << "/{sobol.json,samples.csv}\n";
  return 0;
}

int run_serve(ServiceConfig cfg) {
  AnalysisService service(cfg.data_dir);
  httplib::Server server;
  mount_routes(server, service, cfg.ui_dir);
  std::cout << "listening on http://" << cfg.host << ':' << cfg.port << " (data: " << cfg.data_dir.string()
            << ")\n";
  if (!server.listen(cfg.host, cfg.port)) {
    std::cerr << "cannot bind " << cfg.host << ':' << cfg.port << '\n';
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-aircraft complexity and complex community analysis"};
  app.require_subcommand(1);

  fs::path log_path;
  fs::path out_dir = "out";
  ParamOptions analyze_opts;
  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline on a trajectory log");
  analyze->add_option("--log", log_path, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", out_dir, "Output directory")->capture_default_str();
  analyze_opts.attach(analyze);

  ParamOptions sweep_opts;
  std::size_t n_base = 1024;
  std::string bounds = "thresh_h=15:75,complexity=40:100";
  unsigned threads = 0;
  auto* sensitivity = app.add_subcommand("sensitivity", "Sobol sensitivity sweep over the thresholds");
  sensitivity->add_option("--log", log_path, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  sensitivity->add_option("--out", out_dir, "Output directory")->capture_default_str();
  sensitivity->add_option("--n", n_base, "Base sample count (power of two)")->capture_default_str();
  sensitivity->add_option("--bounds", bounds, "name=lo:hi,... (thresh_h, complexity, thresh_v)")
      ->capture_default_str();
  sensitivity->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep_opts.attach(sensitivity);

  auto serve_cfg = ServiceConfig::from_environment();
  std::string bind;
  auto* serve = app.add_subcommand("serve", "Start the HTTP analysis service");
  serve->add_option("--data", serve_cfg.data_dir, "Data directory (AIRCOMPLEX_DATA_DIR)");
  serve->add_option("--bind", bind, "host:port (AIRCOMPLEX_BIND)");
  serve->add_option("--ui", serve_cfg.ui_dir, "Built UI bundle to serve at / (AIRCOMPLEX_UI_DIR)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return run_analyze(log_path, analyze_opts, out_dir);
    if (*sensitivity) return run_sensitivity(log_path, sweep_opts, n_base, bounds, threads, out_dir);
    if (*serve) {
      if (!bind.empty()) {
        const auto colon = bind.rfind(':');
        if (colon == std::string::npos) throw InvalidParams("--bind must be host:port");
        serve_cfg.host = bind.substr(0, colon);
        serve_cfg.port = std::stoi(bind.substr(colon + 1));
      }
      return run_serve(serve_cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << e.kind() << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
