// afrit: offline FRIT tuning and closed-loop A-FRIT scenario runner.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical breakdown,
// 1 anything else.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "afrit/errors.hpp"
#include "afrit/frit.hpp"
#include "afrit/harness.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string file_stem(std::string name) {
  std::replace_if(name.begin(), name.end(), [](char c) { return c == '/' || c == '=' || c == ' '; }, '_');
  return name;
}

void print_table(const std::vector<afrit::MethodSummary>& table, const std::string& format) {
  if (format == "json")
    std::cout << afrit::table_to_json(table).dump(2) << '\n';
  else
    afrit::write_table_csv(std::cout, table);
}

void save_table(const std::vector<afrit::MethodSummary>& table, const std::optional<fs::path>& out,
                const std::string& stem) {
  if (!out) return;
  fs::create_directories(*out);
  std::ofstream csv(*out / (stem + "_table.csv"));
  afrit::write_table_csv(csv, table);
  std::ofstream js(*out / (stem + "_table.json"));
  js << afrit::table_to_json(table).dump(2) << '\n';
}

int cmd_tune(const fs::path& csv, std::optional<double> ts, const std::string& gm_kind, double tau,
             bool do_polish, const std::string& format) {
  const auto data = ts ? afrit::read_dataset_csv(csv, *ts) : afrit::read_dataset_csv(csv);
  afrit::ReferenceModelSpec spec;
  spec.kind = gm_kind == "exact-zoh" ? afrit::ReferenceModelSpec::Kind::ExactZoh
                                     : afrit::ReferenceModelSpec::Kind::Nominal;
  if (gm_kind != "nominal" && gm_kind != "exact-zoh")
    throw afrit::ConfigError("--reference-model must be nominal or exact-zoh");
  spec.tau = tau;
  const auto gm = spec.build(data.ts);
  auto theta = afrit::batch_tune(data, gm);
  if (do_polish) theta = afrit::polish(theta, data, gm);
  const double cost = afrit::frit_cost(theta, data, gm);
  if (format == "json") {
    std::cout << nlohmann::json{{"kp", theta.kp()}, {"ki", theta.ki()}, {"kd", theta.kd()}, {"frit_cost", cost}}
                     .dump(2)
              << '\n';
  } else {
    std::cout.precision(10);
    std::cout << "kp,ki,kd,frit_cost\n" << theta.kp() << ',' << theta.ki() << ',' << theta.kd() << ',' << cost << '\n';
  }
  return 0;
}

int cmd_run(const fs::path& scenario, std::optional<std::uint64_t> seed, const fs::path& out,
            const std::string& format) {
  auto cfg = afrit::load_scenario(scenario);
  if (seed) cfg.seeds = {*seed};
  const auto traces = afrit::run_trials(cfg);
  fs::create_directories(out);
  const std::string stem = file_stem(cfg.name);

  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& tr : traces) {
    std::ofstream csv(out / (stem + "_seed" + std::to_string(tr.summary.seed) + ".csv"));
    afrit::write_trace_csv(csv, tr);
    summaries.push_back(afrit::summary_to_json(tr.summary));
    if (tr.summary.orthant_exits > 0)
      std::cerr << "warning: seed " << tr.summary.seed << ": gains left the positive orthant "
                << tr.summary.orthant_exits << " time(s)\n";
  }
  const auto table = std::vector{afrit::summarize(cfg.name, traces)};
  nlohmann::json doc{{"trials", summaries}, {"aggregate", afrit::table_to_json(table)[0]}};
  std::ofstream(out / (stem + "_summary.json")) << doc.dump(2) << '\n';

  if (format == "json") {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "seed,mae,max_ae,model_mae,model_max_ae,kp,ki,kd\n";
    std::cout.precision(10);
    for (const auto& tr : traces) {
      const auto& s = tr.summary;
      std::cout << s.seed << ',' << s.mae << ',' << s.max_ae << ',' << s.model_mae << ','
                << s.model_max_ae << ',' << s.theta_final(0) << ',' << s.theta_final(1) << ','
                << s.theta_final(2) << '\n';
    }
  }
  return 0;
}

int cmd_record(const fs::path& scenario, std::optional<std::uint64_t> seed, const fs::path& out) {
  auto cfg = afrit::load_scenario(scenario);
  const auto trace = afrit::run_scenario(cfg, seed.value_or(cfg.seeds.front()));
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  afrit::write_dataset_csv(out, trace.dataset(cfg.ts));
  std::cout << out.string() << '\n';
  return 0;
}

int cmd_sweep(const fs::path& scenario, const std::vector<double>& mus, std::optional<std::uint64_t> seed,
              const std::optional<fs::path>& out, const std::string& format) {
  auto cfg = afrit::load_scenario(scenario);
  if (seed) cfg.seeds = {*seed};
  const auto table = afrit::sweep_mu(cfg, mus);
  save_table(table, out, file_stem(cfg.name) + "_sweep");
  print_table(table, format);
  return 0;
}

int cmd_compare(const fs::path& path, double mu_ef, double mu_df, double mu_er,
                std::optional<std::uint64_t> seed, const std::optional<fs::path>& out,
                const std::string& format) {
  std::vector<afrit::ScenarioConfig> cfgs;
  std::string stem;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw afrit::ConfigError("no scenario files in " + path.string());
    for (const auto& f : files) cfgs.push_back(afrit::load_scenario(f));
    stem = path.filename().empty() ? path.parent_path().filename().string() : path.filename().string();
  } else {
    cfgs = afrit::method_variants(afrit::load_scenario(path), mu_ef, mu_df, mu_er);
    stem = path.stem().string();
  }
  if (seed)
    for (auto& c : cfgs) c.seeds = {*seed};
  const auto table = afrit::compare_methods(cfgs);
  save_table(table, out, file_stem(stem) + "_compare");
  print_table(table, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven PID tuning: offline FRIT and adaptive FRIT with EF/DF/ER forgetting"};
  app.require_subcommand(1);

  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "run a single trial with this seed");
  };

  fs::path dataset;
  std::optional<double> ts;
  std::string gm_kind = "nominal";
  double tau = 1.0;
  bool do_polish = false;
  auto* tune = app.add_subcommand("tune", "batch FRIT tuning from one closed-loop dataset (k,r,u,y CSV)");
  tune->add_option("dataset", dataset, "dataset CSV")->required();
  tune->add_option("--ts", ts, "sampling time; overrides the JSON sidecar");
  tune->add_option("--reference-model", gm_kind, "nominal | exact-zoh");
  tune->add_option("--tau", tau, "exact-zoh time constant [s]");
  tune->add_flag("--polish", do_polish, "refine with coordinate search on the FRIT cost");
  tune->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  fs::path scenario;
  fs::path out_dir = ".";
  auto* run = app.add_subcommand("run", "run a scenario; writes trace CSVs and a summary JSON");
  run->add_option("scenario", scenario, "scenario JSON")->required();
  run->add_option("--out", out_dir, "output directory");
  add_common(run);

  fs::path record_out = "dataset.csv";
  auto* record = app.add_subcommand("record", "record one trial of a scenario as a k,r,u,y dataset");
  record->add_option("scenario", scenario)->required();
  record->add_option("--out", record_out, "dataset CSV path (sidecar JSON written next to it)");
  record->add_option("--seed", seed);

  std::vector<double> mus{0.99, 0.90, 0.85, 0.80, 0.75};
  std::optional<fs::path> table_out;
  auto* sweep = app.add_subcommand("sweep", "DF forgetting-factor sweep over a scenario");
  sweep->add_option("scenario", scenario)->required();
  sweep->add_option("--mu", mus, "forgetting factors")->expected(1, -1);
  sweep->add_option("--out", table_out, "directory for the summary table");
  add_common(sweep);

  fs::path compare_path;
  double mu_ef = 0.99, mu_df = 0.90, mu_er = 0.99;
  auto* compare = app.add_subcommand(
      "compare", "tabulate error distributions over a directory of scenarios, or over the five "
                 "method variants of a single scenario file");
  compare->add_option("path", compare_path)->required();
  compare->add_option("--mu-ef", mu_ef);
  compare->add_option("--mu-df", mu_df);
  compare->add_option("--mu-er", mu_er);
  compare->add_option("--out", table_out, "directory for the summary table");
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*tune) return cmd_tune(dataset, ts, gm_kind, tau, do_polish, format);
    if (*run) return cmd_run(scenario, seed, out_dir, format);
    if (*record) return cmd_record(scenario, seed, record_out);
    if (*sweep) return cmd_sweep(scenario, mus, seed, table_out, format);
    if (*compare) return cmd_compare(compare_path, mu_ef, mu_df, mu_er, seed, table_out, format);
  } catch (const afrit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const afrit::NumericalBreakdown& e) {
    std::cerr << "numerical breakdown: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const afrit::RankDeficient& e) {
    std::cerr << "numerical breakdown: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const afrit::InverseNotProper& e) {
    std::cerr << "numerical breakdown: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
