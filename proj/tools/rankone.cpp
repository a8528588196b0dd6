#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankone/cli.hpp"

using rankone::cli::json;

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Entrywise rank-one positivity preservers: checks, classifiers and Cauchy equations"};
  app.require_subcommand(1);

  rankone::cli::CheckOptions check;
  std::optional<std::uint64_t> seed_flag;
  auto* c = app.add_subcommand("check", "Search for a rank-one matrix whose entrywise image leaves the cone");
  c->add_option("--fn", check.fn, "Function spec")->required();
  c->add_option("--domain", check.domain, "Entry domain")->required();
  c->add_option("--n", check.n, "Matrix dimension")->check(CLI::PositiveNumber);
  c->add_option("--out-k", check.out_k, "Rank bound for the image")->check(CLI::PositiveNumber);
  c->add_option("--trials", check.trials, "Random rank-one trials");
  c->add_option("--seed", seed_flag, "RNG seed");
  c->add_option("--psd-tol", check.psd_tol, "Relative eigenvalue tolerance");
  c->add_option("--rank-tol", check.rank_tol, "Relative rank tolerance");

  rankone::cli::ClassifyOptions classify;
  auto* k = app.add_subcommand("classify", "Fit a power-family member to sampled values");
  k->add_option("samples", classify.samples, "Sample CSV")->required();
  k->add_option("--mode", classify.mode, "real | complex | rank2")->check(CLI::IsMember({"real", "complex", "rank2"}));
  k->add_option("--domain", classify.domain, "Domain of the samples");
  k->add_option("--tol", classify.tol, "Fit tolerance");

  rankone::cli::CauchyOptions cauchy;
  auto* y = app.add_subcommand("cauchy", "Solve a Cauchy functional equation from samples");
  y->add_option("samples", cauchy.samples, "Sample CSV")->required();
  y->add_option("--equation", cauchy.equation, "a | b | c | d")->required();
  y->add_option("--domain", cauchy.domain, "Domain of the samples");
  y->add_option("--tol", cauchy.tol, "Residual tolerance");

  rankone::cli::IndependenceOptions indep;
  auto* d = app.add_subcommand("independence", "Linear independence of power-family members on a grid");
  d->add_option("--members", indep.members, "Member specs")->required();
  d->add_option("--grid", indep.grid, "Grid spec")->required();
  d->add_option("--rel-tol", indep.rel_tol, "Relative singular value threshold");

  std::string report_path;
  auto* v = app.add_subcommand("verify", "Replay a report and recheck its certificate");
  v->add_option("report", report_path, "Report JSON file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  auto start = std::chrono::steady_clock::now();
  try {
    std::string command = app.get_subcommands().front()->get_name();
    std::optional<std::uint64_t> seed;
    json res;
    if (command == "check") {
      check.seed = seed_flag ? *seed_flag : rankone::cli::default_seed();
      seed = check.seed;
      res = rankone::cli::run_check(check);
    } else if (command == "classify") {
      res = rankone::cli::run_classify(classify);
    } else if (command == "cauchy") {
      res = rankone::cli::run_cauchy(cauchy);
    } else if (command == "independence") {
      res = rankone::cli::run_independence(indep);
    } else {
      std::ifstream in(report_path);
      json report;
      try {
        report = json::parse(in);
      } catch (const json::exception& e) {
        throw rankone::InputError(std::string("report is not valid JSON: ") + e.what());
      }
      res = rankone::cli::run_verify(report);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto report = rankone::cli::make_report(command, args, res, seed, secs);
    std::cout << report.dump(2) << "\n";
    std::cerr << rankone::cli::summarize(command, report.at("verdict")) << "\n";
    return 0;
  } catch (const rankone::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const rankone::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed report: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal failure: " << e.what() << "\n";
    return 2;
  }
}
