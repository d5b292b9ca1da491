#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

std::pair<std::string, std::string> split_at(const std::string& s, char sep, const std::string& flag) {
  auto k = s.find(sep);
  if (k == std::string::npos || k == 0) throw CLI::ValidationError(flag, "expected '" + s + "' to contain '" + sep + "'");
  return {s.substr(0, k), s.substr(k + 1)};
}

void print_summary(const nlohmann::ordered_json& report, std::ostream& os) {
  for (const auto& f : report["files"]) {
    os << f["file"].get<std::string>() << ": ";
    if (f.contains("error")) {
      os << "error: " << f["error"].get<std::string>();
    } else if (f.contains("simulation")) {
      const auto& s = f["simulation"];
      os << s["feasible"] << " feasible runs, " << s["violations"] << " violations";
    } else if (f.contains("summary") && f["summary"].contains("proved")) {
      const auto& s = f["summary"];
      os << s["proved"] << "/" << s["total"] << " proved, " << s["falsified"] << " falsified, " << s["unknown"]
         << " unknown";
    } else if (f.contains("vcs")) {
      os << f["vcs"].size() << " VCs";
    }
    os << " (exit " << f["exit"] << ")\n";
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hvcg: verification and refinement of hybrid programs"};
  app.require_subcommand(1);

  hvcg::cli::RunConfig cfg;
  std::vector<std::string> params, bounds;
  std::string out;
  long long budget = -1;

  auto common = [&](CLI::App* sub) {
    sub->add_option("files", cfg.files, "Input files")->required()->check(CLI::ExistingFile);
    sub->add_option("--param", params, "Parameter value name=val (repeatable)");
    sub->add_option("--bounds", bounds, "Proving box var=lo:hi (repeatable)");
    sub->add_option("--budget", budget, "Interval box splits per VC")->check(CLI::NonNegativeNumber);
    sub->add_option("--jobs", cfg.jobs, "Parallel VC discharge")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--out", out, "Write the JSON report here instead of stdout");
  };
  common(app.add_subcommand("verify", "Generate and discharge the VCs of each file"));
  common(app.add_subcommand("refine", "Replay a refinement script: goal file [script file]"));
  common(app.add_subcommand("vcs", "Generate VCs without discharging them"));
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo runs checked against the postcondition");
  common(sim);
  sim->add_option("--runs", cfg.runs, "Number of runs")->check(CLI::PositiveNumber);
  sim->add_option("--star-bound", cfg.star_bound, "Maximal loop iterations per run")->check(CLI::NonNegativeNumber);
  sim->add_option("--trajectory", cfg.trajectory, "CSV of one run (the first violating one if any)");

  try {
    app.parse(argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();
    for (const auto& p : params) {
      auto [k, v] = split_at(p, '=', "--param");
      cfg.params[k] = v;
    }
    for (const auto& b : bounds) {
      auto [k, range] = split_at(b, '=', "--bounds");
      cfg.bounds[k] = split_at(range, ':', "--bounds");
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : hvcg::cli::kMalformed;
  }
  if (budget >= 0) cfg.budget = budget;

  auto res = hvcg::cli::run_command(cfg);
  std::string text = res.report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    print_summary(res.report, std::cerr);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << out << "\n";
      return hvcg::cli::kMalformed;
    }
    f << text;
    print_summary(res.report, std::cout);
  }
  return res.exit_code;
}
