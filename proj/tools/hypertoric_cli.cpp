#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "hypertoric/hypertoric.h"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct ConfigDeleter {
  void operator()(ht_config* c) const { ht_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ht_config, ConfigDeleter>;

struct StringDeleter {
  void operator()(char* s) const { ht_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct CliError {
  std::string message;
};

void check(ht_status status) {
  if (status != HT_OK) throw CliError{std::string(ht_status_name(status)) + ": " + ht_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{"cannot open " + path};
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_output(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{"cannot write " + path};
  out << text;
}

ConfigPtr load_config(const std::string& path) {
  ht_config* raw = nullptr;
  check(ht_config_load(path.c_str(), &raw));
  return ConfigPtr(raw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypertoric geometry: flat configurations, chambers, metrics, moment maps and periodic potentials."};
  app.require_subcommand(1);

  ht_options opts;
  ht_options_default(&opts);
  std::string out_path;
  std::string config_path;
  std::string points_path;
  std::string deformation_path;
  std::string plot_path;
  std::string problem_path;
  std::string families_path;
  std::string builtin_name = "goto";
  std::size_t builtin_n = 2;
  std::size_t builtin_depth = 8;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--window", opts.window, "flats per family")->capture_default_str();
    sub->add_option("--tol", opts.tol, "incidence tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", opts.seed, "seed for random sampling")->capture_default_str();
    sub->add_option("--out", out_path, "report file (default stdout)");
  };

  auto* validate = app.add_subcommand("validate", "convergence and smoothness checks on a configuration");
  validate->add_option("config", config_path, "configuration JSON")->required();
  validate->add_option("--box", opts.box, "prune flats outside the cube |a| <= R");
  common(validate);

  auto* topology = app.add_subcommand("topology", "chambers, bounded polytopes, adjacency and intersection poset");
  topology->add_option("config", config_path, "configuration JSON")->required();
  topology->add_option("--box", opts.box, "half-width of the enumeration box (default: fitted to the data)");
  topology->add_option("--plot", plot_path, "write polytope vertex rows for plotting");
  common(topology);

  auto* eval = app.add_subcommand("eval", "potential, Gram matrix and connection at points");
  eval->add_option("config", config_path, "configuration JSON")->required();
  eval->add_option("points", points_path, "points CSV")->required();
  eval->add_option("--trunc", opts.truncation, "initial truncation window")->capture_default_str();
  eval->add_option("--deformation", deformation_path, "Taub-NUT deformation JSON");
  common(eval);

  auto* identities = app.add_subcommand("identities", "finite-difference checks of the prepotential identities");
  identities->add_option("config", config_path, "configuration JSON")->required();
  identities->add_option("--points", points_path, "points CSV (default: seeded random sample)");
  identities->add_option("--samples", opts.samples, "number of random points")->capture_default_str();
  identities->add_option("--box", opts.box, "sampling reach (default 3)");
  identities->add_option("--step", opts.h, "finite-difference step h")->capture_default_str();
  identities->add_option("--identity-tol", opts.identity_tol, "residual budget")->capture_default_str();
  identities->add_option("--deformation", deformation_path, "Taub-NUT deformation JSON");
  common(identities);

  auto* solve = app.add_subcommand("solve-moment", "solve the real moment equation on a complexified orbit");
  solve->add_option("problem", problem_path, "moment problem JSON")->required();
  common(solve);

  auto* periodic = app.add_subcommand("periodic", "regularized periodic potential, periodicity and fibration");
  periodic->add_option("families", families_path, "periodic families JSON")->required();
  periodic->add_option("points", points_path, "points CSV")->required();
  periodic->add_option("--trunc", opts.truncation, "terms per family on each side")->capture_default_str();
  common(periodic);

  auto* exporter = app.add_subcommand("export-builtin", "write a built-in configuration");
  exporter->add_option("--name", builtin_name, "configuration name")->check(CLI::IsMember({"goto"}))->capture_default_str();
  exporter->add_option("--n", builtin_n, "rank")->capture_default_str()->check(CLI::PositiveNumber);
  exporter->add_option("--depth", builtin_depth, "explicit members per infinite family")->capture_default_str()->check(CLI::PositiveNumber);
  exporter->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    char* raw = nullptr;
    int pass = 1;
    if (*exporter) {
      ht_config* c = nullptr;
      check(ht_config_builtin_goto(builtin_n, builtin_depth, &c));
      ConfigPtr cfg(c);
      check(ht_config_serialize(cfg.get(), &raw));
    } else if (*validate) {
      auto cfg = load_config(config_path);
      check(ht_validate(cfg.get(), &opts, &raw, &pass));
    } else if (*topology) {
      auto cfg = load_config(config_path);
      check(ht_topology(cfg.get(), &opts, &raw));
      if (!plot_path.empty()) {
        char* plot = nullptr;
        check(ht_topology_plot(raw, &plot));
        OwnedString owned(plot);
        write_output(plot_path, plot);
      }
    } else if (*eval || *identities) {
      auto cfg = load_config(config_path);
      std::optional<std::string> points, deformation;
      if (!points_path.empty()) points = read_file(points_path);
      if (!deformation_path.empty()) deformation = read_file(deformation_path);
      const char* p = points ? points->c_str() : nullptr;
      const char* d = deformation ? deformation->c_str() : nullptr;
      if (*eval) {
        check(ht_eval(cfg.get(), p, d, &opts, &raw, &pass));
      } else {
        check(ht_identities(cfg.get(), p, d, &opts, &raw, &pass));
      }
    } else if (*solve) {
      const auto problem = read_file(problem_path);
      check(ht_solve_moment(problem.c_str(), &opts, &raw));
    } else if (*periodic) {
      const auto families = read_file(families_path);
      const auto points = read_file(points_path);
      check(ht_periodic(families.c_str(), points.c_str(), &opts, &raw, &pass));
    }
    OwnedString report(raw);
    if (report) write_output(out_path, report.get());
    return pass ? 0 : kExitFail;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitError;
  }
}
