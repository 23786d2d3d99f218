#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specsqueeze/cli/config.hpp"
#include "specsqueeze/cli/svg.hpp"
#include "specsqueeze/cli/sweep.hpp"
#include "specsqueeze/cli/validate.hpp"

namespace {

using namespace specsqueeze;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitValidation = 4;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::UnknownPreset:
    case ErrorKind::DomainError:
    case ErrorKind::IOError:
    case ErrorKind::MissingColumn:
      return kExitConfig;
    case ErrorKind::Unstable:
      return kExitUnstable;
    default:
      return kExitValidation;
  }
}

struct ConfigArgs {
  std::string config;
  std::string preset;
  std::string strategy;
  std::string out;
  std::vector<std::string> sets;
  bool allow_unstable = false;
};

cli::RunConfig load(const ConfigArgs& a) {
  cli::KeyValues file;
  if (!a.config.empty()) file = cli::read_config_file(a.config);
  std::vector<std::string> items = a.sets;
  if (!a.preset.empty()) items.push_back("preset=" + a.preset);
  if (!a.strategy.empty()) items.push_back("strategy=" + a.strategy);
  if (!a.out.empty()) items.push_back("out=" + a.out);
  if (a.allow_unstable) items.push_back("allow_unstable=true");
  auto overrides = cli::parse_overrides(items);
  // A preset given on the command line replaces the file's scenario, not just
  // its preset key.
  if (!a.preset.empty()) {
    for (auto it = file.begin(); it != file.end();) {
      it = it->first == "preset" ? file.erase(it) : std::next(it);
    }
  }
  return cli::build_config(file, overrides);
}

void add_config_options(CLI::App* sub, ConfigArgs& a) {
  sub->add_option("--config", a.config, "key=value configuration file");
  sub->add_option("--preset", a.preset, "scenario preset: fig4a, fig4b, fig4c, fig5");
  sub->add_option("--set", a.sets, "override a configuration key (key=value); repeatable");
}

int run_sweep(const ConfigArgs& a) {
  const auto cfg = load(a);
  if (cfg.model == cli::ModelKind::Optomech) {
    const auto st = optomech::stability(cfg.params);
    if (!st.stable && cfg.allow_unstable) {
      std::cout << "unstable drift matrix; eigenvalues:\n";
      for (int k = 0; k < 4; ++k) {
        std::cout << "  " << cli::format_number(st.eigenvalues(k).real()) << " "
                  << cli::format_number(st.eigenvalues(k).imag()) << "i\n";
      }
      return kExitOk;
    }
  }
  const auto result = cli::run_sweep(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (cfg.out.empty()) {
    cli::write_csv(std::cout, result);
  } else {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) throw Error(ErrorKind::IOError, "cannot write '" + cfg.out + "'");
    cli::write_csv(out, result);
    if (!out) throw Error(ErrorKind::IOError, "failed writing '" + cfg.out + "'");
    std::cerr << "wrote " << result.rows.size() << " rows to " << cfg.out << '\n';
  }
  return kExitOk;
}

int run_validate(const ConfigArgs& a, bool corrupt) {
  const auto cfg = load(a);
  cli::ValidateOptions opt;
  opt.corrupt_model = corrupt;
  const auto rep = cli::run_validation(cfg, opt);
  cli::print_report(std::cout, rep);
  return rep.all_passed() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode squeezing and entanglement spectra of stationary fields"};
  app.require_subcommand(1);

  ConfigArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "evaluate spectra over a frequency or mu2/mu1 grid");
  add_config_options(sweep, sweep_args);
  sweep->add_option("--out", sweep_args.out, "CSV output path (default: stdout)");
  sweep->add_option("--strategy", sweep_args.strategy, "detection strategy: I, II, III, heterodyne");
  sweep->add_flag("--allow-unstable", sweep_args.allow_unstable,
                  "print drift eigenvalues instead of failing on an unstable model");

  ConfigArgs validate_args;
  bool corrupt = false;
  auto* validate = app.add_subcommand("validate", "run invariant checks on the configured model");
  add_config_options(validate, validate_args);
  validate->add_flag("--corrupt-model", corrupt, "inject a fault into the spectrum (testing only)")
      ->group("");

  std::string csv_path, svg_path, title;
  std::vector<std::string> cols;
  double inset_center = 0.0, inset_halfwidth = 1e-3;
  auto* plot = app.add_subcommand("plot", "render CSV columns as an SVG line plot");
  plot->add_option("--csv", csv_path, "input CSV")->required();
  plot->add_option("--cols", cols, "comma-separated column names")->required()->delimiter(',');
  plot->add_option("--out", svg_path, "output SVG")->required();
  auto* inset_opt = plot->add_option("--inset-center", inset_center, "center of a zoomed inset panel");
  plot->add_option("--inset-halfwidth", inset_halfwidth, "half-width of the inset panel");
  plot->add_option("--title", title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) return run_sweep(sweep_args);
    if (*validate) return run_validate(validate_args, corrupt);
    if (*plot) {
      cli::PlotOptions opt;
      opt.columns = cols;
      opt.title = title;
      if (*inset_opt) {
        opt.inset_center = inset_center;
        opt.inset_halfwidth = inset_halfwidth;
      }
      cli::write_svg(svg_path, cli::render_svg(cli::read_csv(csv_path), opt));
      std::cerr << "wrote " << svg_path << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
