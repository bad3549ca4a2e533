// Command-line front end. Exit codes: 0 success, 1 verification failure,
// 2 usage or input error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cbia/bounds.hpp"
#include "cbia/builtins.hpp"
#include "cbia/index_coding.hpp"
#include "cbia/problem_json.hpp"
#include "cbia/report.hpp"
#include "cbia/scheme.hpp"
#include "cbia/simulator.hpp"
#include "cbia/verifier.hpp"

namespace {

using namespace cbia;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool looks_like_file(const std::string& arg) {
  return arg.size() > 5 && arg.compare(arg.size() - 5, 5, ".json") == 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path, e.what());
  }
}

CBProblem load_problem_arg(const std::string& arg) {
  if (looks_like_file(arg)) return problem_from_json(read_json(arg));
  return builtin_problem(arg);
}

LinearScheme load_scheme_arg(const CBProblem& p, const std::string& arg) {
  if (looks_like_file(arg)) return scheme_from_json(read_json(arg));
  return builtin_scheme(p, arg);
}

GICProblem load_gic_arg(const std::string& arg) {
  if (looks_like_file(arg)) return gic_from_json(read_json(arg));
  return builtin_gic(arg);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw UsageError("cannot write '" + out_path + "'");
  out << text;
}

void emit(const Json& j, const std::string& out_path) { emit(j.dump(2) + "\n", out_path); }

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw UsageError("a seed is required (--seed or CBIA_SEED)");
  return *seed;
}

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw UsageError("bad SNR list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty SNR list");
  return out;
}

/// "a2+b1,a1+c1" -> {{a2,b1},{a1,c1}}
std::vector<CodedMessage> parse_plan(const std::string& text) {
  std::vector<CodedMessage> plan;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    CodedMessage c;
    std::stringstream parts(item);
    std::string m;
    while (std::getline(parts, m, '+')) {
      if (m.empty()) throw UsageError("bad XOR plan '" + text + "'");
      c.insert(m);
    }
    if (c.empty()) throw UsageError("bad XOR plan '" + text + "'");
    plan.push_back(std::move(c));
  }
  return plan;
}

FadingSpec make_spec(int tau, std::uint64_t seed, const std::vector<std::string>& overrides, bool scaled) {
  FadingSpec spec;
  spec.tau = tau;
  spec.seed = seed;
  spec.spatial = scaled ? SpatialModel::independent_scaled : SpatialModel::iid;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("receiver tau must look like RX=N, got '" + o + "'");
    try {
      spec.receiver_tau[o.substr(0, eq)] = std::stoi(o.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("receiver tau must look like RX=N, got '" + o + "'");
    }
  }
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind interference alignment workbench for cellular networks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string problem, scheme, gic, out_path, plan_text, objective = "sum", snr_text = "0,10,20,30,40";
  std::optional<std::uint64_t> seed;
  int tau = 1, draws = 20, exact_trials = 0;
  double tol = kDefaultRankTolerance;
  std::vector<std::string> receiver_tau;
  bool scaled = false, as_json = false;
  std::string slope_text;

  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "RNG seed")->envname("CBIA_SEED"); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out,-o", out_path, "write the artifact here instead of stdout"); };
  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--problem,-p", problem, "built-in problem name or problem JSON path")->required();
  };

  auto* gen = app.add_subcommand("gen-topology", "write a built-in problem as JSON");
  add_problem(gen);
  add_out(gen);

  auto* build = app.add_subcommand("build-scheme", "write a built-in scheme as JSON");
  add_problem(build);
  build->add_option("--scheme,-s", scheme, "scheme name")->required();
  add_out(build);

  auto* ver = app.add_subcommand("verify", "check linear resolvability over random channel draws");
  add_problem(ver);
  ver->add_option("--scheme,-s", scheme, "built-in scheme name or scheme JSON path")->required();
  ver->add_option("--tau", tau, "coherence block length in slots")->check(CLI::PositiveNumber);
  ver->add_option("--receiver-tau", receiver_tau, "per-receiver coherence override RX=N");
  ver->add_option("--draws", draws, "channel draws")->check(CLI::PositiveNumber);
  ver->add_option("--tol", tol, "relative rank tolerance")->check(CLI::PositiveNumber);
  ver->add_option("--exact", exact_trials, "also run the exact rational verifier this many times");
  ver->add_flag("--scaled", scaled, "independent per-link scales");
  add_seed(ver);
  add_out(ver);

  auto* bnd = app.add_subcommand("bound", "converse LP bound");
  add_problem(bnd);
  add_out(bnd);

  auto* orth = app.add_subcommand("orthogonal", "best orthogonal schedule");
  add_problem(orth);
  orth->add_option("--objective", objective, "sum or symmetric")->check(CLI::IsMember({"sum", "symmetric"}));
  add_out(orth);

  auto* cb2gic = app.add_subcommand("map-cb-gic", "map a CB problem to index coding");
  add_problem(cb2gic);
  add_out(cb2gic);

  auto* gic2cb = app.add_subcommand("map-gic-cb", "map an index coding problem to CB");
  gic2cb->add_option("--gic,-g", gic, "fig10, fig16 or GIC JSON path")->required();
  add_out(gic2cb);

  auto* half = app.add_subcommand("half-dof", "1/2 DoF per message alignment consistency test");
  half->add_option("--gic,-g", gic, "fig10, fig16 or GIC JSON path")->required();
  add_out(half);

  auto* xr = app.add_subcommand("xor-check", "message-level XOR decoding");
  xr->add_option("--gic,-g", gic, "fig10, fig16 or GIC JSON path")->required();
  xr->add_option("--plan", plan_text, "coded messages, e.g. a2+b1,a1+c1 (default: the fig16 plan)");
  add_out(xr);

  auto* sim = app.add_subcommand("simulate", "zero-forcing rates versus SNR (CSV)");
  add_problem(sim);
  sim->add_option("--scheme,-s", scheme, "built-in scheme name or scheme JSON path")->required();
  sim->add_option("--tau", tau, "coherence block length in slots")->check(CLI::PositiveNumber);
  sim->add_option("--receiver-tau", receiver_tau, "per-receiver coherence override RX=N");
  sim->add_option("--draws", draws, "channel draws")->check(CLI::PositiveNumber);
  sim->add_option("--snr", snr_text, "comma-separated SNR list in dB");
  sim->add_option("--slope", slope_text, "also print the DoF slope between two listed SNRs, e.g. 30,40");
  sim->add_flag("--scaled", scaled, "independent per-link scales");
  add_seed(sim);
  add_out(sim);

  auto* rec = app.add_subcommand("reciprocal", "swap transmitters and receivers");
  add_problem(rec);
  add_out(rec);

  auto* rep = app.add_subcommand("report", "reproduce every built-in scheme and bound");
  rep->add_option("--draws", draws, "channel draws per scheme")->check(CLI::PositiveNumber);
  rep->add_flag("--json", as_json, "JSON instead of a text table");
  add_seed(rep);
  add_out(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      emit(problem_to_json(load_problem_arg(problem)), out_path);
    } else if (*build) {
      const auto p = load_problem_arg(problem);
      emit(scheme_to_json(builtin_scheme(p, scheme)), out_path);
    } else if (*ver) {
      const auto p = load_problem_arg(problem);
      const auto s = load_scheme_arg(p, scheme);
      const auto spec = make_spec(tau, require_seed(seed), receiver_tau, scaled);
      const auto r = verify(p, s, spec, draws, tol);
      Json j = report_to_json(r);
      bool pass = r.pass();
      if (exact_trials > 0) {
        const auto e = verify_exact(p, s, spec, exact_trials);
        j["exact"] = {{"pass", e.pass}, {"trials", exact_trials}, {"failing_receivers", e.failing_receivers}};
        pass = pass && e.pass;
      }
      emit(j, out_path);
      std::cerr << (pass ? "PASS" : "FAIL") << " sum DoF " << to_string(r.sum_dof);
      if (!r.pass()) {
        std::cerr << "; failing receivers:";
        for (const auto& f : r.failing_receivers()) std::cerr << ' ' << f;
      }
      std::cerr << '\n';
      return pass ? kOk : kFailed;
    } else if (*bnd) {
      emit(converse_to_json(converse_lp(load_problem_arg(problem))), out_path);
    } else if (*orth) {
      const auto p = load_problem_arg(problem);
      const auto r = orthogonal_max(p, objective == "sum" ? Objective::sum : Objective::symmetric);
      emit(orthogonal_to_json(p, r), out_path);
      std::cerr << to_string(r.value) << (r.proven_optimal ? "" : " (not proven optimal)") << '\n';
    } else if (*cb2gic) {
      emit(gic_to_json(cb_to_gic(load_problem_arg(problem))), out_path);
    } else if (*gic2cb) {
      emit(problem_to_json(gic_to_cb(load_gic_arg(gic))), out_path);
    } else if (*half) {
      const auto g = load_gic_arg(gic);
      const auto v = half_dof_feasible(g);
      Json j{{"feasible", v.feasible}};
      if (v.feasible) {
        j["groups"] = v.groups;
        j["scheme"] = scheme_to_json(v.scheme);
      } else {
        j["receiver"] = v.receiver;
        j["desired"] = v.desired;
        j["interferer"] = v.interferer;
        j["chain"] = Json::array();
        for (const auto& c : v.chain) j["chain"].push_back({{"receiver", c.receiver}, {"pair", {c.first, c.second}}});
      }
      emit(j, out_path);
      std::cerr << (v.feasible ? "feasible" : "infeasible") << '\n';
    } else if (*xr) {
      const auto g = load_gic_arg(gic);
      const auto plan = plan_text.empty() ? fig16_xor_plan() : parse_plan(plan_text);
      const auto r = verify_xor_scheme(g, plan);
      Json j{{"dof", r.dof}, {"undelivered", r.undelivered}, {"recovered", r.recovered}};
      emit(j, out_path);
      std::cerr << r.dof << " DoF\n";
    } else if (*sim) {
      const auto p = load_problem_arg(problem);
      const auto s = load_scheme_arg(p, scheme);
      const auto spec = make_spec(tau, require_seed(seed), receiver_tau, scaled);
      const auto t = simulate_rates(p, s, spec, parse_snr_list(snr_text), draws);
      emit(rates_to_csv(t), out_path);
      if (!slope_text.empty()) {
        const auto w = parse_snr_list(slope_text);
        if (w.size() != 2) throw UsageError("--slope needs two SNRs");
        std::cerr << "slope " << estimate_dof(t, w[0], w[1]) << '\n';
      }
    } else if (*rec) {
      emit(problem_to_json(reciprocal(load_problem_arg(problem))), out_path);
    } else if (*rep) {
      const auto rows = run_report(require_seed(seed), draws);
      if (as_json) {
        emit(report_to_json(rows), out_path);
      } else {
        emit(format_report(rows), out_path);
      }
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
