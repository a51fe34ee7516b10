// dakns: command-line front end. Exit codes: 0 ok / 1 verification or
// computation failure / 2 input error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dakns/dakns.hpp"

namespace {

using namespace dakns;

struct Shared {
  std::string config;
  std::string out;
  std::string format = "json";
  std::string mode;
  double tol = 0;
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct Args {
  int k = 1;
  int alpha = 1;
  std::string method = "dressed";
  std::string h;
  int steps = -1;
  std::string suite = "all";
};

void log(const Shared& sh, const std::string& msg) {
  if (sh.verbose) std::cerr << "dakns: " << msg << '\n';
}

void emit(const ExperimentConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(cfg.out, text);
  }
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

ExperimentConfig load(const Shared& sh, const CLI::App& app) {
  if (sh.config.empty()) throw input_error("--config is required (or DAKNS_CONFIG)");
  ExperimentConfig cfg = load_config(sh.config);
  if (!sh.mode.empty()) cfg.mode = parse_mode(sh.mode);
  if (app.count("--tol") || std::getenv("DAKNS_TOL")) {
    if (!(sh.tol > 0)) throw input_error("--tol must be positive");
    cfg.tol = sh.tol;
  }
  if (app.count("--seed") || std::getenv("DAKNS_SEED")) cfg.seed = sh.seed;
  if (!sh.out.empty()) cfg.out = sh.out;
  return cfg;
}

FlowIndex flow_arg(const Args& a, int m) {
  if (a.k < 0) throw input_error("--k must be >= 0");
  if (a.alpha < 1 || a.alpha > m) throw input_error("--alpha must be in 1.." + std::to_string(m));
  return {a.k, a.alpha - 1};
}

template <Scalar T>
int cmd_dress(const ExperimentConfig& cfg, const Shared& sh) {
  Rng rng(cfg.seed);
  const HierarchyState<T> s = make_initial_state<T>(cfg, rng);
  log(sh, "dressing residual " + format_scalar(dressing_residual(s)));
  emit(cfg, sh.format == "csv" ? dressing_csv(s.dressing) : dump(state_to_json(s)));
  return 0;
}

template <Scalar T>
int cmd_resolvent(const ExperimentConfig& cfg, const Shared& sh, const Args& a) {
  Rng rng(cfg.seed);
  const HierarchyState<T> s = make_initial_state<T>(cfg, rng);
  const int al = flow_arg(a, s.m()).alpha;
  SeriesFn<T> R;
  if (a.method == "dressed")
    R = resolvent_dressed(s, al).R;
  else if (a.method == "direct")
    R = resolvent_direct(s.data, s.U, al, s.N, s.dressing.conv.policy, false).R;
  else
    throw input_error("--method must be dressed or direct");
  const Window& w = s.window();
  if (sh.format == "csv")
    emit(cfg, seriesfn_csv(R, w.store_lo(), w.store_hi()));
  else
    emit(cfg, dump({{"alpha", a.alpha}, {"method", a.method}, {"R", lattice_to_json(R)}}));
  return 0;
}

template <Scalar T>
int cmd_flow(const ExperimentConfig& cfg, const Shared& sh, const Args& a) {
  Rng rng(cfg.seed);
  const HierarchyState<T> s = make_initial_state<T>(cfg, rng);
  const FlowIndex f = flow_arg(a, s.m());
  const FlowField<T> F = flow_field(s, f.k, f.alpha, cfg.tol);
  log(sh, "positive-degree residual " + format_scalar(F.positive_residual) + ", degree-0 diagonal " +
              format_scalar(F.diagonal_residual));
  if (sh.format == "csv")
    emit(cfg, matfn_csv(F.field));
  else
    emit(cfg, dump({{"flow", {f.k, a.alpha}},
                    {"positive_residual", format_scalar(F.positive_residual)},
                    {"diagonal_residual", format_scalar(F.diagonal_residual)},
                    {"claim", {s.claim_lo(), s.claim_hi()}},
                    {"field", lattice_to_json(F.field)}}));
  return 0;
}

int cmd_evolve(const ExperimentConfig& cfg, const Shared& sh, const Args& a) {
  if (cfg.mode == Mode::rational) log(sh, "time integration runs in float mode");
  Rng rng(cfg.seed);
  const HierarchyState<double> s = make_initial_state<double>(cfg, rng);
  const FlowIndex f = flow_arg(a, s.m());
  const double h = to_double(parse_scalar<Rational>(a.h.empty() ? cfg.h : a.h));
  const int steps = a.steps >= 0 ? a.steps : cfg.steps;
  EvolveOptions opt;
  opt.policy = s.dressing.conv.policy;
  opt.tol = cfg.tol;
  opt.on_warning = [](const std::string& m) { std::cerr << "dakns: warning: " << m << '\n'; };
  const Trajectory tr = rk4_evolve(s, f, h, steps, opt);
  log(sh, "max leakage " + format_scalar(tr.max_leakage) + ", max |u_ii| " + format_scalar(tr.max_diagonal));
  emit(cfg, sh.format == "csv" ? trajectory_csv(tr) : dump(trajectory_json(tr)));
  return 0;
}

int cmd_limit(const ExperimentConfig& cfg, const Shared& sh) {
  const AknsData<double> d = make_data<double>(cfg);
  std::vector<double> eps;
  for (const auto& e : cfg.eps) eps.push_back(to_double(parse_scalar<Rational>(e)));
  EvolveOptions opt;
  opt.policy = cfg.policy;
  opt.tol = cfg.tol;
  json flows = json::array();
  std::string csv = "flow,eps,cauchy,dx_residual,flow_norm\n";
  for (int al = 0; al < d.m(); ++al) {
    const ContinuumReport r = continuum_scan(d, cfg.profile, eps, {1, al}, cfg.N, opt);
    json pts = json::array();
    for (const auto& p : r.points) {
      pts.push_back({{"eps", p.eps}, {"cauchy", std::isnan(p.cauchy) ? json(nullptr) : json(p.cauchy)},
                     {"dx_residual", p.dx_residual}, {"flow_norm", p.flow_norm}});
      csv += flow_label(r.flow) + "," + format_scalar(p.eps) + "," +
             (std::isnan(p.cauchy) ? std::string() : format_scalar(p.cauchy)) + "," + format_scalar(p.dx_residual) +
             "," + format_scalar(p.flow_norm) + "\n";
    }
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(format_scalar(v)); };
    json co = json::array(), ro = json::array();
    for (double v : r.cauchy_orders) co.push_back(num(v));
    for (double v : r.residual_orders) ro.push_back(num(v));
    flows.push_back({{"flow", {1, al + 1}},
                     {"points", pts},
                     {"cauchy_orders", co},
                     {"residual_orders", ro},
                     {"min_cauchy_order", num(r.min_cauchy_order)},
                     {"min_residual_order", num(r.min_residual_order)}});
    log(sh, flow_label(r.flow) + ": min Cauchy order " + format_scalar(r.min_cauchy_order) +
                ", min residual order " + format_scalar(r.min_residual_order));
  }
  emit(cfg, sh.format == "csv" ? csv : dump({{"profile_width", cfg.profile.width}, {"flows", flows}}));
  return 0;
}

template <Scalar T>
int cmd_tau(const ExperimentConfig& cfg, const Shared& sh) {
  const AknsData<T> d = make_data<T>(cfg);
  const auto [tau, comp] = make_tau<T>(cfg);
  const TimePoint<T> t = make_times<T>(cfg);
  const HierarchyState<T> s = dressing_from_tau(tau, comp, t, d, cfg.window, cfg.N);
  if (sh.verbose) {
    T worst(0);
    for (int n = cfg.window.n_min; n < cfg.window.n_max; ++n) {
      const auto [lhs, rhs] = lambda_consistency(tau, n, t, d);
      worst = std::max(worst, expoly_distance(lhs, rhs));
    }
    log(sh, "lambda consistency gap " + format_scalar(worst) + ", dressing residual " +
                format_scalar(dressing_residual(s)));
  }
  emit(cfg, sh.format == "csv" ? dressing_csv(s.dressing) : dump(state_to_json(s)));
  return 0;
}

template <Scalar T>
int cmd_verify(const ExperimentConfig& cfg, const Shared& sh, const Args& a) {
  const VerificationReport rep = run_verify_suite<T>(cfg, parse_suite(a.suite));
  emit(cfg, sh.format == "csv" ? report_csv(rep) : dump(to_json(rep)));
  log(sh, std::to_string(rep.checks.size()) + " checks, " + std::to_string(rep.failures()) + " failed");
  if (sh.verbose)
    for (const auto& c : rep.checks)
      if (!c.pass) std::cerr << "dakns: FAIL " << c.check << ' ' << c.parameters.dump() << " residual " << c.residual << '\n';
  return rep.verdict() ? 0 : 1;
}

template <Scalar T>
int dispatch(const std::string& cmd, const ExperimentConfig& cfg, const Shared& sh, const Args& a) {
  if (cmd == "dress") return cmd_dress<T>(cfg, sh);
  if (cmd == "resolvent") return cmd_resolvent<T>(cfg, sh, a);
  if (cmd == "flow") return cmd_flow<T>(cfg, sh, a);
  if (cmd == "evolve") return cmd_evolve(cfg, sh, a);
  if (cmd == "verify") return cmd_verify<T>(cfg, sh, a);
  if (cmd == "limit") return cmd_limit(cfg, sh);
  if (cmd == "tau") return cmd_tau<T>(cfg, sh);
  throw input_error("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete AKNS-D hierarchy workbench"};
  app.require_subcommand(1);
  Shared sh;
  Args a;
  app.add_option("--config", sh.config, "experiment config (JSON)")->envname("DAKNS_CONFIG");
  app.add_option("--out", sh.out, "output path (default stdout)")->envname("DAKNS_OUT");
  app.add_option("--format", sh.format, "output format")->check(CLI::IsMember({"json", "csv"}))->envname("DAKNS_FORMAT");
  app.add_option("--mode", sh.mode, "scalar mode")->check(CLI::IsMember({"rational", "float"}))->envname("DAKNS_MODE");
  app.add_option("--tol", sh.tol, "float-mode tolerance")->envname("DAKNS_TOL");
  app.add_option("--seed", sh.seed, "random seed")->envname("DAKNS_SEED");
  app.add_flag("--verbose,-v", sh.verbose, "diagnostics on stderr")->envname("DAKNS_VERBOSE");

  auto* dress = app.add_subcommand("dress", "solve the dressing and write the state");
  auto* res = app.add_subcommand("resolvent", "resolvent R_alpha per site");
  res->add_option("--alpha", a.alpha, "index 1..m");
  res->add_option("--method", a.method, "dressed|direct");
  auto* flow = app.add_subcommand("flow", "flow field of (k, alpha)");
  flow->add_option("--k", a.k, "flow order");
  flow->add_option("--alpha", a.alpha, "index 1..m");
  auto* evolve = app.add_subcommand("evolve", "RK4 time evolution (float)");
  evolve->add_option("--k", a.k, "flow order");
  evolve->add_option("--alpha", a.alpha, "index 1..m");
  evolve->add_option("--dt", a.h, "time step h (overrides config)");
  evolve->add_option("--steps", a.steps, "number of steps (overrides config)");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", a.suite, "algebra|resolvent|bilinear|dynamics|limit|all");
  auto* limit = app.add_subcommand("limit", "continuum scan of the (1, alpha) flows (float)");
  auto* tau = app.add_subcommand("tau", "dressing from an exponential-sum tau");
  for (auto* s : {dress, res, flow, evolve, verify, limit, tau}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig cfg = load(sh, app);
    if (cmd == "evolve" || cmd == "limit" || cfg.mode == Mode::binary_float) return dispatch<double>(cmd, cfg, sh, a);
    return dispatch<Rational>(cmd, cfg, sh, a);
  } catch (const input_error& e) {
    std::cerr << "dakns: input error: " << e.what() << '\n';
    return 2;
  } catch (const dimension_error& e) {
    std::cerr << "dakns: input error: " << e.what() << '\n';
    return 2;
  } catch (const validity_error& e) {
    std::cerr << "dakns: input error: " << e.what() << '\n';
    return 2;
  } catch (const representation_error& e) {
    std::cerr << "dakns: input error: " << e.what() << '\n';
    return 2;
  } catch (const consistency_error& e) {
    std::cerr << "dakns: computation failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "dakns: error: " << e.what() << '\n';
    return 1;
  }
}
