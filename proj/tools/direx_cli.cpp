// direx command line: curve generation, EAT rate tables, protocol simulation
// and self-verification, built on the public C API of libdirex.
#include <direx/direx.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitNumeric = 4;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw CliError{code, message}; }

void check(int status, const std::string& what) {
  if (status == DIREX_OK) return;
  const std::string detail = direx_last_error();
  const std::string msg = what + ": " + direx_status_str(status) + (detail.empty() ? "" : " (" + detail + ")");
  switch (status) {
    case DIREX_ERR_ARG:
    case DIREX_ERR_DOMAIN:
    case DIREX_ERR_IO:
      fail(kExitUsage, msg);
    case DIREX_ERR_MISMATCH:
      fail(kExitMismatch, msg);
    default:
      fail(kExitNumeric, msg);
  }
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(kExitUsage, "config section '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const auto& a : allowed)
      if (key == a) ok = true;
    if (!ok) fail(kExitUsage, "unknown config key '" + key + "' in " + where);
  }
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) fail(kExitUsage, "cannot open config file: " + path);
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    fail(kExitUsage, std::string("invalid JSON config: ") + e.what());
  }
  reject_unknown_keys(j, {"seed", "threads", "out", "curves", "rates", "simulate", "verify"}, "top level");
  return j;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& resolved,
                    const std::vector<std::string>& outputs) {
  json manifest;
  manifest["tool"] = "direx";
  manifest["version"] = direx_version();
  manifest["command"] = command;
  manifest["config"] = resolved;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(fnv1a(resolved.dump())));
  manifest["config_hash"] = hash;
  manifest["outputs"] = outputs;
  std::ofstream os(out_dir / (command + "_manifest.json"));
  os << manifest.dump(2) << "\n";
}

int quantity_from_string(const std::string& name) {
  static const std::vector<std::string> names = {"AB_00E", "AB_XYE", "AB_E", "A_00E", "A_XYE", "A_E"};
  for (size_t i = 0; i < names.size(); ++i)
    if (name == names[i]) return static_cast<int>(i);
  fail(kExitUsage, "unknown quantity: " + name + " (expected one of AB_00E, AB_XYE, AB_E, A_00E, A_XYE, A_E)");
}

int protocol_from_string(const std::string& name) {
  if (name == "spotcheck") return DIREX_PROTO_SPOTCHECK;
  if (name == "biased") return DIREX_PROTO_BIASED;
  if (name == "recycled") return DIREX_PROTO_RECYCLED;
  fail(kExitUsage, "unknown protocol: " + name + " (expected spotcheck, biased or recycled)");
}

struct CurveData {
  std::vector<double> omega, entropy;
};

CurveData curve_points(const direx_curve* c) {
  size_t n = 0;
  check(direx_curve_info(c, nullptr, nullptr, &n), "curve info");
  CurveData d;
  for (size_t i = 0; i < n; ++i) {
    double w, h;
    check(direx_curve_point(c, i, &w, &h, nullptr, nullptr), "curve point");
    d.omega.push_back(w);
    d.entropy.push_back(h);
  }
  return d;
}

// Minimal two-series polyline plot, enough to eyeball a curve pair.
void write_svg(const fs::path& path, const CurveData& g, const CurveData& f, const std::string& title) {
  const double w_lo = 0.75, w_hi = 0.855;
  double h_hi = 0.0;
  for (double v : g.entropy) h_hi = std::max(h_hi, v);
  h_hi = std::max(h_hi * 1.05, 0.1);
  const int width = 640, height = 440, ml = 60, mb = 40, mt = 30, mr = 20;
  const auto X = [&](double w) { return ml + (w - w_lo) / (w_hi - w_lo) * (width - ml - mr); };
  const auto Y = [&](double h) { return height - mb - h / h_hi * (height - mb - mt); };
  std::ofstream os(path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << width / 2 << "' y='18' text-anchor='middle' font-size='14'>" << title << "</text>\n";
  os << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='" << height - mb
     << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double w = w_lo + (w_hi - w_lo) * i / 5;
    os << "<text x='" << X(w) << "' y='" << height - mb + 16 << "' text-anchor='middle' font-size='10'>" << w
       << "</text>\n";
    const double h = h_hi * i / 5;
    os << "<text x='" << ml - 6 << "' y='" << Y(h) + 3 << "' text-anchor='end' font-size='10'>" << h
       << "</text>\n";
  }
  const auto poly = [&](const CurveData& d, const char* color) {
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < d.omega.size(); ++i) os << X(d.omega[i]) << "," << Y(d.entropy[i]) << " ";
    os << "'/>\n";
  };
  poly(g, "#888888");
  poly(f, "#c03020");
  os << "<text x='" << width - 150 << "' y='" << mt + 14 << "' font-size='11' fill='#888888'>G curve</text>\n";
  os << "<text x='" << width - 150 << "' y='" << mt + 28 << "' font-size='11' fill='#c03020'>F envelope</text>\n";
  os << "</svg>\n";
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  uint64_t seed = 0x5eed;
  uint32_t threads = 0;
};

json merge_common(const CommonOpts& opts, const json& cfg, bool seed_set, bool threads_set, bool out_set,
                  CommonOpts* resolved) {
  *resolved = opts;
  if (!seed_set && cfg.contains("seed")) resolved->seed = cfg["seed"].get<uint64_t>();
  if (!threads_set && cfg.contains("threads")) resolved->threads = cfg["threads"].get<uint32_t>();
  if (!out_set && cfg.contains("out")) resolved->out_dir = cfg["out"].get<std::string>();
  json j;
  j["seed"] = resolved->seed;
  j["threads"] = resolved->threads;
  j["out"] = resolved->out_dir;
  return j;
}

struct ProtocolOpts {
  std::string protocol = "recycled";
  double omega_exp = 0.752;
  double gamma = 3.383e-4;
  double zeta_a = 0.25, zeta_b = 0.25;
  double delta = 0.0;  // 0 = derive from completeness target where applicable
  double eps_h = 3.09e-12 * 0.4995;
  double eps_eat = 3.09e-12;
  double eps_ext = 3.09e-12 * 1e-3;
  double eps_c = 1e-6;
  double ext_loss_const = 0.0;

  direx_protocol to_c(uint64_t rounds) const {
    direx_protocol p{};
    p.variant = protocol_from_string(protocol);
    p.gamma = gamma;
    p.zeta_a = zeta_a;
    p.zeta_b = zeta_b;
    p.omega_exp = omega_exp;
    p.delta_conf = delta;
    p.rounds = rounds;
    return p;
  }
  direx_error_budget budget() const { return {eps_h, eps_eat, eps_ext, eps_c, ext_loss_const}; }
  json to_json() const {
    return json{{"protocol", protocol}, {"omega_exp", omega_exp}, {"gamma", gamma},
                {"zeta_a", zeta_a},     {"zeta_b", zeta_b},       {"delta", delta},
                {"eps_h", eps_h},       {"eps_eat", eps_eat},     {"eps_ext", eps_ext},
                {"eps_c", eps_c},       {"ext_loss_const", ext_loss_const}};
  }
};

void add_protocol_options(CLI::App* app, ProtocolOpts* p) {
  app->add_option("--protocol", p->protocol, "spotcheck | biased | recycled");
  app->add_option("--omega-exp", p->omega_exp, "expected CHSH score");
  app->add_option("--gamma", p->gamma, "spot-check test probability");
  app->add_option("--zeta-a", p->zeta_a, "P(X=1) for the biased protocol");
  app->add_option("--zeta-b", p->zeta_b, "P(Y=1) for the biased protocol");
  app->add_option("--delta", p->delta, "score confidence width (0 = derive from eps-c)");
  app->add_option("--eps-h", p->eps_h, "smoothing parameter");
  app->add_option("--eps-eat", p->eps_eat, "EAT failure floor");
  app->add_option("--eps-ext", p->eps_ext, "extractor error");
  app->add_option("--eps-c", p->eps_c, "completeness target");
}

int run_curves(const CommonOpts& common, const json& section, const std::string& quantity_name,
               uint32_t grid_points, uint32_t restarts, uint32_t max_iters, double tolerance, double zeta_a,
               double zeta_b, bool product_inputs) {
  reject_unknown_keys(section, {"quantity", "grid_points", "restarts", "max_iters", "tolerance"}, "curves");
  const std::string qname = section.value("quantity", quantity_name);
  const int quantity = quantity_from_string(qname);
  grid_points = section.value("grid_points", grid_points);
  restarts = section.value("restarts", restarts);
  max_iters = section.value("max_iters", max_iters);
  tolerance = section.value("tolerance", tolerance);

  const fs::path out_dir(common.out_dir);
  if (!fs::is_directory(out_dir)) fail(kExitUsage, "output directory does not exist: " + common.out_dir);

  std::vector<double> grid(4096);
  size_t n = 0;
  check(direx_default_grid(grid_points, grid.data(), grid.size(), &n), "grid");
  grid.resize(n);

  const double pxy[4] = {product_inputs ? (1 - zeta_a) * (1 - zeta_b) : 0.25,
                         product_inputs ? (1 - zeta_a) * zeta_b : 0.25,
                         product_inputs ? zeta_a * (1 - zeta_b) : 0.25,
                         product_inputs ? zeta_a * zeta_b : 0.25};

  direx_opt_config cfg;
  direx_opt_config_default(&cfg);
  cfg.restarts = restarts;
  cfg.max_iters = max_iters;
  cfg.tolerance = tolerance;
  cfg.seed = common.seed;
  cfg.threads = common.threads;

  std::cerr << "building G_" << qname << " over " << n << " grid points, " << restarts << " restarts each\n";
  direx_curve* g = nullptr;
  check(direx_curve_build(quantity, grid.data(), n, pxy, &cfg, &g), "curve build");
  direx_curve* f = nullptr;
  check(direx_curve_envelope(g, &f), "convex envelope");

  const std::string g_path = (out_dir / ("curve_" + qname + "_G.csv")).string();
  const std::string f_path = (out_dir / ("curve_" + qname + "_F.csv")).string();
  const std::string j_path = (out_dir / ("curve_" + qname + "_F.json")).string();
  const std::string svg_path = (out_dir / ("curve_" + qname + ".svg")).string();
  check(direx_curve_save(g, g_path.c_str()), "save G");
  check(direx_curve_save(f, f_path.c_str()), "save F");
  check(direx_curve_save(f, j_path.c_str()), "save F json");
  write_svg(svg_path, curve_points(g), curve_points(f), "minimum entropy vs CHSH score: " + qname);

  int has_tangent = 0;
  double ws = 0, slope = 0;
  check(direx_curve_tangent(f, &has_tangent, &ws, &slope), "tangent");
  if (has_tangent)
    std::cout << "omega_star = " << ws << "\ntangent_slope = " << slope << "\n";
  else
    std::cout << "curve is convex; no tangent point (F = G)\n";

  json resolved;
  resolved["common"] = json{{"seed", common.seed}, {"threads", common.threads}, {"out", common.out_dir}};
  resolved["curves"] = json{{"quantity", qname},   {"grid_points", grid_points}, {"restarts", restarts},
                            {"max_iters", max_iters}, {"tolerance", tolerance},  {"pxy", pxy}};
  write_manifest(out_dir, "curves", resolved, {g_path, f_path, j_path, svg_path});

  direx_curve_free(f);
  direx_curve_free(g);
  return kExitOk;
}

int run_rates(const CommonOpts& common, const ProtocolOpts& proto, const std::string& curve_path,
              const std::string& n_list, bool crossover, bool sweep_rate_param) {
  if (curve_path.empty()) fail(kExitUsage, "rates requires --curve FILE");
  direx_curve* f = nullptr;
  check(direx_curve_load(curve_path.c_str(), &f), "load curve");

  const fs::path out_dir(common.out_dir);
  if (!fs::is_directory(out_dir)) fail(kExitUsage, "output directory does not exist: " + common.out_dir);

  const direx_error_budget budget = proto.budget();
  std::vector<std::string> outputs;
  json resolved;
  resolved["common"] = json{{"seed", common.seed}, {"threads", common.threads}, {"out", common.out_dir}};
  resolved["rates"] = proto.to_json();
  resolved["rates"]["curve"] = curve_path;
  resolved["rates"]["crossover"] = crossover;
  resolved["rates"]["sweep_rate_param"] = sweep_rate_param;

  if (crossover) {
    const direx_protocol p = proto.to_c(0);
    int found = 0;
    uint64_t n_star = 0;
    direx_eat_result res{};
    check(direx_eat_crossover(f, &p, &budget, sweep_rate_param ? 1 : 0, &found, &n_star, &res), "crossover");
    if (!found) {
      std::cout << "no expansion up to n = 1e12\n";
    } else {
      std::cout << "crossover_n = " << n_star << "\nnet_bits = " << res.net_expansion << "\nalpha = " << res.alpha
                << "\nt = " << res.t << "\ndelta = " << res.delta_conf << "\n";
    }
    write_manifest(out_dir, "crossover", resolved, outputs);
    direx_curve_free(f);
    return kExitOk;
  }

  std::vector<uint64_t> rounds;
  std::stringstream ss(n_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    rounds.push_back(static_cast<uint64_t>(std::stod(tok)));
  }
  if (rounds.empty()) fail(kExitUsage, "rates requires --n N1,N2,... or --crossover");

  const std::string table_path = (out_dir / "rates.csv").string();
  std::ofstream os(table_path);
  os << "n,omega,gamma_or_zeta,alpha,t,hmin,input,net\n";
  for (uint64_t n : rounds) {
    const direx_protocol p = proto.to_c(n);
    direx_eat_result res{};
    check(direx_eat_net(f, &p, &budget, sweep_rate_param ? 1 : 0, &res), "net expansion");
    char line[256];
    std::snprintf(line, sizeof(line), "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(n), proto.omega_exp, res.gamma_or_zeta, res.alpha, res.t,
                  res.hmin_bound, res.input_bits, res.net_expansion);
    os << line;
    std::cout << "n=" << n << " net=" << res.net_expansion << " (alpha=" << res.alpha << ", t=" << res.t << ")\n";
  }
  outputs.push_back(table_path);
  write_manifest(out_dir, "rates", resolved, outputs);
  direx_curve_free(f);
  return kExitOk;
}

int run_simulate(const CommonOpts& common, const ProtocolOpts& proto, uint64_t rounds, uint32_t trials,
                 double device_omega) {
  const fs::path out_dir(common.out_dir);
  if (!fs::is_directory(out_dir)) fail(kExitUsage, "output directory does not exist: " + common.out_dir);

  ProtocolOpts resolved_proto = proto;
  if (resolved_proto.delta == 0.0) {
    const direx_protocol probe = resolved_proto.to_c(rounds);
    double d = 0;
    check(direx_delta_for_completeness(&probe, resolved_proto.eps_c, &d), "delta from completeness");
    resolved_proto.delta = d;
  }
  const direx_protocol p = resolved_proto.to_c(rounds);
  const double omega_xy[4] = {device_omega, device_omega, device_omega, device_omega};
  direx_sim_config sc{common.seed, trials, common.threads};
  std::vector<uint8_t> aborted(trials);
  std::vector<double> scores(trials);
  direx_sim_summary summary{};
  check(direx_simulate(&p, omega_xy, &sc, &summary, aborted.data(), scores.data()), "simulate");

  const std::string table_path = (out_dir / "trials.csv").string();
  std::ofstream os(table_path);
  os << "trial,aborted,score_hat\n";
  for (uint32_t i = 0; i < trials; ++i) {
    char line[80];
    std::snprintf(line, sizeof(line), "%u,%d,%.17g\n", i, aborted[i] ? 1 : 0, scores[i]);
    os << line;
  }

  json summary_json;
  summary_json["trials"] = summary.trials;
  summary_json["aborts"] = summary.aborts;
  summary_json["abort_rate"] = summary.abort_rate;
  summary_json["analytic_bound"] = summary.analytic_bound;
  summary_json["mean_score"] = summary.mean_score;
  summary_json["score_stddev"] = summary.score_stddev;
  summary_json["delta"] = resolved_proto.delta;
  const std::string summary_path = (out_dir / "simulate_summary.json").string();
  std::ofstream(summary_path) << summary_json.dump(2) << "\n";

  const double slack = 3 * std::sqrt(std::max(0.0, summary.analytic_bound * (1 - summary.analytic_bound)) /
                                     std::max(1u, summary.trials)) +
                       1.0 / std::max(1u, summary.trials);
  std::cout << "abort_rate = " << summary.abort_rate << " (analytic bound " << summary.analytic_bound << ")\n";
  if (summary.abort_rate > summary.analytic_bound + slack)
    fail(kExitMismatch, "empirical abort rate exceeds the analytic bound beyond Monte Carlo slack");

  json resolved;
  resolved["common"] = json{{"seed", common.seed}, {"threads", common.threads}, {"out", common.out_dir}};
  resolved["simulate"] = resolved_proto.to_json();
  resolved["simulate"]["rounds"] = rounds;
  resolved["simulate"]["trials"] = trials;
  resolved["simulate"]["device_omega"] = device_omega;
  write_manifest(out_dir, "simulate", resolved, {table_path, summary_path});
  return kExitOk;
}

int run_verify(const CommonOpts& common, const std::string& suite, uint32_t count, double tol,
               const std::string& curve_path) {
  if (suite == "oracle") {
    double dev = 0;
    const int status = direx_verify_oracle(common.seed, count, tol, common.threads, &dev);
    std::cout << "oracle max deviation over " << count << " strategies: " << dev << "\n";
    if (status == DIREX_ERR_MISMATCH) fail(kExitMismatch, "entropy paths disagree beyond tolerance");
    check(status, "verify oracle");
    return kExitOk;
  }
  if (suite == "envelope") {
    if (curve_path.empty()) fail(kExitUsage, "verify --suite envelope requires --curve FILE");
    direx_curve* f = nullptr;
    check(direx_curve_load(curve_path.c_str(), &f), "load curve");
    double margin = 0;
    const int status = direx_verify_envelope(f, common.seed, count, tol, &margin);
    direx_curve_free(f);
    std::cout << "worst entropy margin above envelope: " << margin << "\n";
    if (status == DIREX_ERR_MISMATCH) fail(kExitMismatch, "a strategy fell below the envelope");
    check(status, "verify envelope");
    return kExitOk;
  }
  fail(kExitUsage, "unknown verify suite: " + suite + " (expected oracle or envelope)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"device-independent randomness expansion rates from CHSH tests"};
  app.require_subcommand(1);

  CommonOpts common;
  bool seed_set = false, threads_set = false, out_set = false;
  app.add_option("--config", common.config_path, "JSON config file");
  app.add_option("--seed", common.seed, "PRNG seed")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", common.threads, "worker threads (0 = auto)")->each([&](const std::string&) {
    threads_set = true;
  });
  app.add_option("--out", common.out_dir, "output directory")->each([&](const std::string&) { out_set = true; });

  // curves
  auto* curves = app.add_subcommand("curves", "minimize entropy over a score grid and build the envelope");
  std::string quantity = "AB_XYE";
  uint32_t grid_points = 60, restarts = 10000, max_iters = 200;
  double tolerance = 1e-9, czeta_a = 0.5, czeta_b = 0.5;
  bool product_inputs = false;
  curves->add_option("--quantity", quantity, "entropy quantity (AB_00E, AB_XYE, AB_E, A_00E, A_XYE, A_E)");
  curves->add_option("--grid-points", grid_points, "base grid size");
  curves->add_option("--restarts", restarts, "optimizer restarts per point");
  curves->add_option("--max-iters", max_iters, "local solver iteration cap");
  curves->add_option("--tolerance", tolerance, "local solver tolerance");
  curves->add_option("--input-zeta-a", czeta_a, "product input bias P(X=1)");
  curves->add_option("--input-zeta-b", czeta_b, "product input bias P(Y=1)");
  curves->add_flag("--product-inputs", product_inputs, "use the product input distribution instead of uniform");

  // rates / crossover
  ProtocolOpts proto;
  std::string curve_path, n_list;
  bool crossover_flag = false, sweep = false;
  auto* rates = app.add_subcommand("rates", "certified randomness rates over a list of round counts");
  add_protocol_options(rates, &proto);
  rates->add_option("--curve", curve_path, "F curve file (CSV or JSON)");
  rates->add_option("--n", n_list, "comma-separated round counts");
  rates->add_flag("--crossover", crossover_flag, "search the smallest n with positive net expansion");
  rates->add_flag("--sweep-rate-param", sweep, "optimize gamma (spot-check) or zeta (biased)");

  ProtocolOpts xproto;
  std::string xcurve_path;
  bool xsweep = false;
  auto* crossover = app.add_subcommand("crossover", "smallest n with positive net expansion");
  add_protocol_options(crossover, &xproto);
  crossover->add_option("--curve", xcurve_path, "F curve file (CSV or JSON)");
  crossover->add_flag("--sweep-rate-param", xsweep, "optimize gamma or zeta at each probe");

  // simulate
  ProtocolOpts sproto;
  uint64_t sim_rounds = 10000;
  uint32_t sim_trials = 1000;
  double device_omega = 0.80;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs of a protocol against an honest device");
  add_protocol_options(simulate, &sproto);
  simulate->add_option("--n", sim_rounds, "rounds per trial");
  simulate->add_option("--trials", sim_trials, "number of trials");
  simulate->add_option("--device-omega", device_omega, "honest device winning probability");

  // verify
  std::string suite = "oracle", vcurve_path;
  uint32_t vcount = 1000;
  double vtol = 1e-8;
  auto* verify = app.add_subcommand("verify", "self-check suites");
  verify->add_option("--suite", suite, "oracle | envelope");
  verify->add_option("--n", vcount, "number of sampled strategies");
  verify->add_option("--tol", vtol, "tolerance");
  verify->add_option("--curve", vcurve_path, "curve for the envelope suite");

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(common.config_path);
    CommonOpts resolved;
    merge_common(common, cfg, seed_set, threads_set, out_set, &resolved);

    if (curves->parsed()) {
      const json section = cfg.value("curves", json::object());
      return run_curves(resolved, section, quantity, grid_points, restarts, max_iters, tolerance, czeta_a,
                        czeta_b, product_inputs);
    }
    if (rates->parsed())
      return run_rates(resolved, proto, curve_path, n_list, crossover_flag, sweep);
    if (crossover->parsed())
      return run_rates(resolved, xproto, xcurve_path, "", true, xsweep);
    if (simulate->parsed())
      return run_simulate(resolved, sproto, sim_rounds, sim_trials, device_omega);
    if (verify->parsed())
      return run_verify(resolved, suite, vcount, vtol, vcurve_path);
    fail(kExitUsage, "no subcommand given");
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
