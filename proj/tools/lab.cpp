#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncl/acceptance.hpp"
#include "ncl/experiment.hpp"

namespace {

// Default output stem for `run`: the spec path without its extension.
std::string stem_of(const std::string& path) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string();
}

// Default plot path for `plotdata`: replace a trailing ".record.json" (or
// any extension) with ".plot.csv".
std::string plot_path_for(const std::string& record_path) {
  const std::string suffix = ".record.json";
  if (record_path.size() > suffix.size() &&
      record_path.ends_with(suffix))
    return record_path.substr(0, record_path.size() - suffix.size()) +
           ".plot.csv";
  return stem_of(record_path) + ".plot.csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for nested collision finding"};
  app.require_subcommand(1);

  std::string spec_path;
  CLI::App* run = app.add_subcommand(
      "run", "run an experiment spec, write rows CSV and record JSON");
  run->add_option("spec", spec_path, "experiment spec JSON file")->required();

  std::string record_path, plot_out;
  std::vector<std::string> overlay_specs;
  CLI::App* plot = app.add_subcommand(
      "plotdata", "emit a long-format plot CSV from a stored record");
  plot->add_option("record", record_path, "record JSON file")->required();
  plot->add_option("--overlay", overlay_specs,
                   "closed-form curve to overlay, name[:c=<value>] "
                   "(repeatable)");
  plot->add_option("--out", plot_out,
                   "output path (default: record stem + .plot.csv)");

  app.add_subcommand("verify", "run the ten-point acceptance checklist");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      ncl::ExperimentSpec spec = ncl::load_spec(spec_path);
      if (spec.out.empty()) spec.out = stem_of(spec_path);
      ncl::ResultRecord rec = ncl::run_experiment(spec);
      auto [csv_path, json_path] = ncl::write_outputs(spec, rec);
      std::cout << "ran " << spec.kind << ": " << rec.rows.size()
                << " rows across " << rec.aggregates.size()
                << " grid points in " << rec.wallclock_sec << "s\n";
      for (const ncl::PointSummary& s : rec.aggregates) {
        std::cout << "  " << rec.sweep_axis << "="
                  << s.point.at(rec.sweep_axis) << ": " << s.headline << " = "
                  << s.stats.at(s.headline);
        if (s.ci.defined)
          std::cout << "  [" << s.ci.lo << ", " << s.ci.hi << "]";
        else
          std::cout << "  [interval undefined: single trial]";
        std::cout << "\n";
      }
      std::cout << "wrote " << csv_path << " and " << json_path << "\n";
      return 0;
    }
    if (plot->parsed()) {
      ncl::StoredRecord stored = ncl::load_record(record_path);
      std::vector<ncl::OverlayCurve> curves;
      for (const std::string& text : overlay_specs)
        curves.push_back(ncl::parse_overlay(text));
      std::string csv = ncl::plotdata_csv(stored, curves);
      std::string out = plot_out.empty() ? plot_path_for(record_path)
                                         : plot_out;
      std::ofstream file(out, std::ios::binary);
      if (!file) throw std::runtime_error("cannot write '" + out + "'");
      file << csv;
      size_t series = stored.record.aggregates.empty()
                          ? curves.size()
                          : stored.record.aggregates.front().stats.size() +
                                curves.size();
      std::cout << "wrote " << out << " (" << series << " series)\n";
      return 0;
    }
    // verify
    int failures = ncl::run_acceptance(std::cout);
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "lab: " << e.what() << "\n";
    return 2;
  }
}
