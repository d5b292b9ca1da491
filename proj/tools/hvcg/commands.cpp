#include "commands.hpp"

#include "hvcg/discharge.hpp"
#include "hvcg/dynamics.hpp"
#include "hvcg/error.hpp"
#include "hvcg/parser.hpp"
#include "hvcg/refine.hpp"
#include "hvcg/sampling.hpp"
#include "hvcg/vcgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace hvcg::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kSimulationTolerance = 1e-9;

// Thrown for malformed input (exit 2).
struct Malformed : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Malformed("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Rational parse_number(const std::string& text, const std::string& what) {
  auto r = parse_rational(text);
  if (!r) throw Malformed("malformed number '" + text + "' in " + what);
  return *r;
}

Json exact_values(const ExactValues& v) {
  Json j = Json::object();
  for (const auto& [k, x] : v) j[k] = format_rational(x);
  return j;
}

std::string domain_text(const TimeDomain& d) {
  return "[0, " + (d.upper ? to_string(*d.upper) : std::string("inf")) + "]";
}

// Loaded model with the command-line overrides applied.
struct Setup {
  Model model;
  Scope scope;
  ProverConfig prover;
  CertifyContext certify;
};

Setup load(const std::string& path, const RunConfig& cfg) {
  Setup s;
  s.model = parse_model(read_file(path));
  s.scope = Scope::of(s.model);
  for (const auto& [name, text] : cfg.params) {
    if (!s.model.declares_param(name)) throw Malformed("--param " + name + ": not a declared parameter");
    s.model.instance[name] = parse_number(text, "--param " + name);
  }
  for (const auto& [name, range] : cfg.bounds) {
    if (!s.model.declares_var(name) && !s.model.declares_param(name))
      throw Malformed("--bounds " + name + ": not a declared variable or parameter");
    Rational lo = parse_number(range.first, "--bounds " + name);
    Rational hi = parse_number(range.second, "--bounds " + name);
    if (hi < lo) throw Malformed("--bounds " + name + ": empty range");
    s.model.bounds[name] = {lo, hi};
  }
  // The instance has to satisfy every parameter assumption it decides.
  for (const auto& decl : s.model.params) {
    auto v = eval_exact(decl.assume, {}, s.model.instance);
    if (v && !*v) throw Malformed("instance violates assumption of " + decl.name + ": " + to_string(decl.assume));
  }
  s.prover.instance = s.model.instance;
  s.prover.bounds = s.model.bounds;
  if (s.model.budget) s.prover.budget = *s.model.budget;
  if (cfg.budget) s.prover.budget = *cfg.budget;
  s.prover.seed = cfg.seed;
  s.certify.assumptions = s.model.assumptions();
  s.certify.instance = s.model.instance;
  s.certify.seed = cfg.seed;
  return s;
}

Json instance_json(const Model& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m.instance) j[k] = format_rational(v);
  return j;
}

Json vc_json(const VC& vc) {
  Json j;
  j["id"] = vc.id;
  j["origin"] = vc.origin;
  Json hyps = Json::array();
  for (const auto& h : vc.hypotheses) hyps.push_back(to_string(h));
  j["hypotheses"] = hyps;
  j["goal"] = vc.is_certificate ? Json(vc.certificate_detail) : Json(to_string(vc.goal));
  if (auto tb = time_binder(vc)) {
    j["time_binder"] = {{"domain", domain_text(tb->domain)}, {"guard_history", to_string(tb->guard_history)}};
  } else {
    j["time_binder"] = nullptr;
  }
  return j;
}

ProofResult settle(const VC& vc, const ProverConfig& config) {
  if (vc.is_certificate) {
    ProofResult r;
    r.status = vc.certificate_ok ? ProofStatus::Proved : ProofStatus::Unknown;
    r.method = "certificate";
    r.detail = vc.certificate_detail;
    return r;
  }
  return discharge(vc, config);
}

// Discharges in parallel; results land at their VC's index so the
// report does not depend on scheduling.
std::vector<ProofResult> settle_all(const std::vector<VC>& vcs, const ProverConfig& config, int jobs) {
  std::vector<ProofResult> out(vcs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < vcs.size(); i = next++) out[i] = settle(vcs[i], config);
  };
  int n = std::max(1, std::min<int>(jobs, static_cast<int>(vcs.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

// Fills the per-VC status fields and the summary; returns the exit code.
int discharge_into(Json& file, const std::vector<VC>& vcs, const Setup& s, int jobs) {
  auto results = settle_all(vcs, s.prover, jobs);
  Json arr = Json::array();
  int proved = 0, falsified = 0, unknown = 0;
  for (std::size_t i = 0; i < vcs.size(); ++i) {
    Json j = vc_json(vcs[i]);
    const ProofResult& r = results[i];
    j["status"] = to_string(r.status);
    j["method"] = r.status == ProofStatus::Unknown && r.method.empty() ? Json(nullptr) : Json(r.method);
    j["splits"] = r.splits;
    if (r.witness) {
      Json w;
      w["vars"] = exact_values(r.witness->vars);
      w["params"] = exact_values(r.witness->params);
      w["time"] = r.witness->time ? Json(format_rational(*r.witness->time)) : Json(nullptr);
      j["counterexample"] = w;
    } else {
      j["counterexample"] = nullptr;
    }
    if (!r.detail.empty()) j["detail"] = r.detail;
    arr.push_back(j);
    switch (r.status) {
    case ProofStatus::Proved: ++proved; break;
    case ProofStatus::Falsified: ++falsified; break;
    case ProofStatus::Unknown: ++unknown; break;
    }
  }
  file["vcs"] = arr;
  file["summary"] = {{"total", vcs.size()}, {"proved", proved}, {"falsified", falsified}, {"unknown", unknown}};
  return proved == static_cast<int>(vcs.size()) ? kProved : kUnproved;
}

Json pending(const std::vector<VC>& vcs) {
  Json arr = Json::array();
  for (const auto& vc : vcs) {
    Json j = vc_json(vc);
    j["status"] = vc.is_certificate ? (vc.certificate_ok ? "proved" : "unknown") : "pending";
    j["method"] = vc.is_certificate ? Json("certificate") : Json(nullptr);
    arr.push_back(j);
  }
  return arr;
}

std::string script_location(const std::string& goal_path, const std::string& script) {
  std::filesystem::path p(script);
  if (p.is_absolute()) return script;
  return (std::filesystem::path(goal_path).parent_path() / p).string();
}

// Replays the refinement of a goal file. Law or target mismatches are
// unproved (exit 1); an unreadable or malformed script is malformed.
int refine_file(Json& file, const std::string& path, const std::string& script_override, const Setup& s,
                const RunConfig& cfg, bool discharge_vcs) {
  if (!s.model.refine) throw Malformed(path + ": expected a refine goal");
  const RefineGoal& g = *s.model.refine;
  std::string script_path = script_override.empty() ? script_location(path, g.script_path) : script_override;
  file["script"] = script_override.empty() ? g.script_path : script_override;
  RefinementScript script;
  try {
    script = parse_script(read_file(script_path));
  } catch (const RefinementError& e) {
    throw Malformed(script_path + ": " + e.what());
  }
  file["steps"] = script.steps.size();
  ReplayResult rr;
  try {
    rr = replay(g.pre, g.post, g.target, script, s.scope, s.model.assumptions(), s.certify);
  } catch (const ParseError& e) {
    throw Malformed(script_path + ": " + e.what());
  } catch (const RefinementError& e) {
    file["replay"] = "failed";
    file["error"] = e.what();
    file["vcs"] = Json::array();
    return kUnproved;
  }
  file["replay"] = "reached target";
  file["final_term"] = print_program(rr.final_term);
  if (!discharge_vcs) {
    file["vcs"] = pending(rr.vcs);
    return kProved;
  }
  return discharge_into(file, rr.vcs, s, cfg.jobs);
}

int verify_file(Json& file, const std::string& path, const Setup& s, const RunConfig& cfg, bool discharge_vcs) {
  if (s.model.refine) {
    file["goal"] = "refine";
    return refine_file(file, path, "", s, cfg, discharge_vcs);
  }
  file["goal"] = "hoare";
  std::vector<VC> vcs = generate(*s.model.hoare, s.model.assumptions(), s.certify);
  if (!discharge_vcs) {
    file["vcs"] = pending(vcs);
    file["summary"] = {{"total", vcs.size()}};
    return kProved;
  }
  return discharge_into(file, vcs, s, cfg.jobs);
}

Values to_doubles(const ExactValues& v) {
  Values out;
  for (const auto& [k, x] : v) out[k] = to_double(x);
  return out;
}

Json store_json(const Store& s) {
  Json j = Json::object();
  for (const auto& n : s.declared()) j[n] = s.get(n);
  return j;
}

int simulate_file(Json& file, const Setup& s, const RunConfig& cfg) {
  if (!s.model.hoare) throw Malformed("simulate expects a hoare goal");
  const HoareGoal& g = *s.model.hoare;
  for (const auto& decl : s.model.params)
    if (!s.model.instance.count(decl.name)) throw Malformed("simulate needs an instance value for " + decl.name);
  ExactValues params_exact(s.model.instance.begin(), s.model.instance.end());
  Values params = to_doubles(params_exact);
  const Program& prog = g.program;
  std::mt19937_64 rng(cfg.seed);
  SimConfig sim;
  sim.record = !cfg.trajectory.empty();

  int feasible = 0, violations = 0, no_start = 0;
  Json first_violation = nullptr;
  std::optional<Trajectory> shown;
  bool shown_violation = false;
  for (int run = 0; run < cfg.runs; ++run) {
    auto init = sample_satisfying(g.pre, s.model.vars, params_exact, rng, s.model.bounds);
    if (!init) {
      ++no_start;
      continue;
    }
    Store start(s.model.vars, to_doubles(*init));
    RunResult r = interpret(prog, start, rng, cfg.star_bound, params, sim);
    if (!r.feasible) continue;
    ++feasible;
    bool ok = holds_with_tolerance(g.post, r.final.values(), params, kSimulationTolerance);
    if (!ok) {
      ++violations;
      if (first_violation.is_null())
        first_violation = {{"run", run}, {"initial", store_json(start)}, {"final", store_json(r.final)}};
    }
    // Keep the first violating run, else the first run that moved.
    if (sim.record && !shown_violation && (!shown || shown->samples.size() <= 1 || !ok)) {
      shown = std::move(r.trace);
      shown_violation = !ok;
    }
  }
  if (sim.record && shown) {
    std::ofstream out(cfg.trajectory, std::ios::binary);
    if (!out) throw Malformed("cannot write " + cfg.trajectory);
    out << to_csv(*shown);
  }
  file["goal"] = "hoare";
  file["simulation"] = {{"runs", cfg.runs},           {"star_bound", cfg.star_bound},
                        {"tolerance", kSimulationTolerance}, {"feasible", feasible},
                        {"unstartable", no_start},     {"violations", violations},
                        {"first_violation", first_violation}};
  if (no_start == cfg.runs) return kUnproved;
  return violations == 0 ? kProved : kUnproved;
}

} // namespace

bool holds_with_tolerance(const Pred& p, const Values& vars, const Values& params, double tol) {
  Pred q = nnf(p);
  switch (q.kind()) {
  case Pred::Kind::True: return true;
  case Pred::Kind::False: return false;
  case Pred::Kind::And:
    return std::all_of(q.parts().begin(), q.parts().end(),
                       [&](const Pred& c) { return holds_with_tolerance(c, vars, params, tol); });
  case Pred::Kind::Or:
    return std::any_of(q.parts().begin(), q.parts().end(),
                       [&](const Pred& c) { return holds_with_tolerance(c, vars, params, tol); });
  case Pred::Kind::Atom: {
    double a, b;
    try {
      Valuation v{&vars, &params, 0.0};
      a = eval(q.lhs(), v);
      b = eval(q.rhs(), v);
    } catch (const EvalError&) {
      return false;
    }
    double slack = tol * std::max({1.0, std::fabs(a), std::fabs(b)});
    double d = a - b;
    switch (q.rel()) {
    case Rel::Eq: return std::fabs(d) <= slack;
    case Rel::Ne: return d != 0.0;
    case Rel::Lt:
    case Rel::Le: return d <= slack;
    case Rel::Gt:
    case Rel::Ge: return d >= -slack;
    }
    return false;
  }
  default: throw Error("postcondition is not a state predicate: " + to_string(p));
  }
}

CommandResult run_command(const RunConfig& cfg) {
  CommandResult res;
  Json& rep = res.report;
  rep["schema"] = kReportSchema;
  rep["command"] = cfg.command;
  rep["seed"] = cfg.seed;
  Json files = Json::array();
  int worst = kProved;

  std::vector<std::string> inputs = cfg.files;
  std::string script_override;
  if (cfg.command == "refine" && inputs.size() == 2 && inputs[1].size() > 4 &&
      inputs[1].compare(inputs[1].size() - 4, 4, ".ref") == 0) {
    script_override = inputs[1];
    inputs.pop_back();
  }

  for (const auto& path : inputs) {
    Json file;
    file["file"] = path;
    int code = kProved;
    try {
      Setup s = load(path, cfg);
      file["instance"] = instance_json(s.model);
      file["budget"] = s.prover.budget;
      if (cfg.command == "verify") {
        code = verify_file(file, path, s, cfg, true);
      } else if (cfg.command == "vcs") {
        code = verify_file(file, path, s, cfg, false);
      } else if (cfg.command == "refine") {
        file["goal"] = "refine";
        code = refine_file(file, path, script_override, s, cfg, true);
      } else if (cfg.command == "simulate") {
        code = simulate_file(file, s, cfg);
      } else {
        throw Malformed("unknown command " + cfg.command);
      }
    } catch (const Malformed& e) {
      code = kMalformed;
      file["error"] = e.what();
    } catch (const ParseError& e) {
      code = kMalformed;
      file["error"] = std::string("parse error: ") + e.what();
    } catch (const AnnotationError& e) {
      code = kMalformed;
      file["error"] = std::string("annotation error: ") + e.what();
    } catch (const Error& e) {
      code = kMalformed;
      file["error"] = e.what();
    }
    file["exit"] = code;
    worst = std::max(worst, code);
    files.push_back(std::move(file));
  }
  rep["files"] = std::move(files);
  rep["exit"] = worst;
  res.exit_code = worst;
  return res;
}

} // namespace hvcg::cli
