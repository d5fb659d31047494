#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sara/app.hpp"
#include "sara/error.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

std::vector<sara::Index> parse_grid(const std::string& text) {
  auto grid = sara::parse_bandwidths(text);
  if (grid.empty()) throw sara::Error(sara::ErrorKind::InvalidConfig, "empty n grid");
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screening-and-ranking change-point detection"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "Segment every label of a TSV file");
  std::string input, output, profile_out;
  std::string method = "msara", bandwidths = "auto", rule, criterion = "mbic";
  double C = 2.0;
  double sigma = -1.0;
  std::uint64_t seed = 1;
  long long jmax = -1;
  detect->add_option("-i,--input", input, "label<TAB>position<TAB>value file")->required();
  detect->add_option("-o,--output", output, "Segmentation TSV (default stdout)");
  detect->add_option("--method", method, "sara | msara")->capture_default_str();
  detect->add_option("--bandwidths", bandwidths, "auto | h1,h2,...")->capture_default_str();
  detect->add_option("--threshold-rule", rule,
                     "c-sigma | log-n | fixed:<lambda> (default: log-n for sara, "
                     "c-sigma for msara)");
  detect->add_option("--C", C, "Constant of the c-sigma rule")->capture_default_str();
  detect->add_option("--criterion", criterion, "threshold | bic | mbic")
      ->capture_default_str();
  detect->add_option("--sigma", sigma, "Known noise level (default: estimated)");
  detect->add_option("--seed", seed, "Random seed")->capture_default_str();
  detect->add_option("--profile-out", profile_out, "Dump D(x,h) at the first bandwidth");
  detect->add_option("--jmax", jmax, "Largest model ranked by sara + bic/mbic");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo study");
  std::string design = "copy-number", trend = "none", sim_output, detection_out;
  long long reps = 1000;
  double sim_sigma = 0.2;
  std::uint64_t sim_seed = 1;
  simulate->add_option("--design", design, "coverage | copy-number | power | theorem1")
      ->capture_default_str();
  simulate->add_option("--reps", reps, "Replicates")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  simulate->add_option("--sigma", sim_sigma, "Noise level (copy-number)")
      ->capture_default_str();
  simulate->add_option("--trend", trend, "none | long | short (copy-number)")
      ->capture_default_str();
  simulate->add_option("-o,--output", sim_output, "Report TSV (default stdout)");
  simulate->add_option("--detection-out", detection_out,
                       "Per change-point detection table (copy-number)");

  // bench
  auto* bench = app.add_subcommand("bench", "Time screen + rank against n");
  std::string n_grid = "100000,200000,400000", bench_output;
  long long bench_reps = 11;
  std::uint64_t bench_seed = 1;
  bench->add_option("--n-grid", n_grid, "Increasing list of n")->capture_default_str();
  bench->add_option("--reps", bench_reps, "Repetitions per n")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Random seed")->capture_default_str();
  bench->add_option("-o,--output", bench_output, "Timing TSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*detect) {
      sara::RunConfig cfg;
      cfg.input_path = input;
      cfg.output_path = output;
      cfg.profile_path = profile_out;
      cfg.method = sara::parse_method(method);
      cfg.bandwidths = sara::parse_bandwidths(bandwidths);
      cfg.C = C;
      if (!rule.empty()) cfg.threshold_rule = sara::parse_threshold_rule(rule, C);
      cfg.criterion = sara::parse_criterion(criterion);
      if (detect->count("--sigma") > 0) {
        if (!(sigma >= 0.0)) {
          throw sara::Error(sara::ErrorKind::InvalidConfig, "--sigma must be >= 0");
        }
        cfg.sigma = sigma;
      }
      cfg.seed = seed;
      cfg.jmax = jmax;
      sara::run_detect(cfg);
    } else if (*simulate) {
      sara::SimulateConfig cfg;
      cfg.design = sara::parse_design(design);
      cfg.reps = reps;
      cfg.seed = sim_seed;
      cfg.sigma = sim_sigma;
      if (trend == "none") cfg.trend = sara::Trend::None;
      else if (trend == "long") cfg.trend = sara::Trend::Long;
      else if (trend == "short") cfg.trend = sara::Trend::Short;
      else throw sara::Error(sara::ErrorKind::InvalidConfig, "trend must be none, long or short");
      cfg.detection_path = detection_out;
      if (sim_output.empty()) {
        sara::run_simulate(cfg, std::cout);
      } else {
        std::ofstream out(sim_output);
        if (!out) throw sara::Error(sara::ErrorKind::IoError, "cannot write '" + sim_output + "'");
        sara::run_simulate(cfg, out);
      }
    } else if (*bench) {
      const auto rows = sara::run_bench(parse_grid(n_grid), bench_reps, bench_seed);
      if (bench_output.empty()) {
        sara::write_bench_tsv(std::cout, rows);
      } else {
        std::ofstream out(bench_output);
        if (!out) throw sara::Error(sara::ErrorKind::IoError, "cannot write '" + bench_output + "'");
        sara::write_bench_tsv(out, rows);
      }
    }
  } catch (const sara::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_input_error() ? kExitInput : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
