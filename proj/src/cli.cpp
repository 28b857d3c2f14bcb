#include "entevolve/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "entevolve/campaign.hpp"
#include "entevolve/io.hpp"

namespace entevolve {
namespace {

void print(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

int cmd_contract(const std::string& file, const std::string& strategy, bool stats,
                 std::ostream& out) {
  const TensorNetworkGraph g = network_from_json(read_json_file(file));
  const ContractionPlan plan = strategy == "exhaustive" ? plan_exhaustive(g) : plan_greedy(g);
  const Evaluation ev = evaluate_counted(g, plan);
  if (!stats) {
    print(out, tensor_to_json(ev.tensor));
    return kExitPass;
  }
  Json p;
  p["strategy"] = strategy;
  p["cost"] = plan.estimated_cost;
  p["steps"] = plan.steps;
  p["multiply_adds"] = ev.multiply_adds;
  Json j;
  j["tensor"] = tensor_to_json(ev.tensor);
  j["plan"] = std::move(p);
  print(out, j);
  return kExitPass;
}

int cmd_rewrite(const std::string& file, std::ostream& out) {
  const RewriteResult r = rewrite_snake(network_from_json(read_json_file(file)));
  Json events = Json::array();
  for (const auto& ev : r.events) events.push_back(rewrite_event_to_json(ev));
  Json j;
  j["network"] = network_to_json(r.graph);
  j["events"] = std::move(events);
  print(out, j);
  return kExitPass;
}

PureState state_from_file(const std::string& file) {
  const Json j = read_json_file(file);
  if (j.is_object() && j.contains("amplitudes")) return state_from_json(j);
  const Tensor t = evaluate(network_from_json(j));
  if (t.rank() != 2 || t.index(0).variance != Variance::Down ||
      t.index(1).variance != Variance::Down) {
    throw Error(ErrorCode::NotStateLike, "network does not evaluate to a bipartite state");
  }
  const auto dims = t.dims();
  Vector amps(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) amps(static_cast<Eigen::Index>(i)) = t[i];
  return PureState({dims[0], dims[1]}, std::move(amps));
}

int cmd_gconc(const std::string& file, std::ostream& out) {
  print(out, measure_to_json(g_concurrence_pure(state_from_file(file))));
  return kExitPass;
}

int cmd_choi(const std::string& file, std::ostream& out) {
  const KrausChannel c = channel_from_json(read_json_file(file));
  const DensityOperator choi = choi_state(c);
  Json j;
  j["dims"] = {choi.dims().a, choi.dims().b};
  j["matrix"] = matrix_to_json(choi.matrix());
  print(out, j);
  return kExitPass;
}

std::size_t env_thread_cap(std::size_t requested) {
  if (const char* cap = std::getenv("ENT_EVOLVE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(cap, &end, 10);
    if (end != cap && v >= 1) return std::min<std::size_t>(requested, v);
  }
  return requested;
}

struct VerifyArgs {
  std::string check;
  std::size_t dim = 2;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::optional<std::string> mode;
  std::optional<double> tolerance;
  std::optional<std::string> out;
  std::string format = "json";
  std::optional<std::size_t> threads;
  std::size_t budget = 64;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  CampaignConfig config;
  const auto check = parse_check_name(a.check);
  if (!check) {
    err << "error: unknown check '" << a.check << "'\n";
    return kExitUsage;
  }
  config.check = *check;
  config.dim = a.dim;
  config.trials = a.trials;
  config.seed = a.seed;
  config.tolerance = a.tolerance;
  config.sampling_budget = a.budget;
  if (a.mode) {
    config.mode = parse_factorization_mode(*a.mode);
    if (!config.mode) {
      err << "error: unknown mode '" << *a.mode << "'\n";
      return kExitUsage;
    }
  }
  config.threads = env_thread_cap(a.threads.value_or(thread_budget()));
  try {
    validate(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const VerificationReport report = run_campaign(config);
  const std::string text =
      a.format == "csv" ? report_to_csv(report) : report_to_json(report).dump(2) + "\n";
  if (a.out) {
    std::ofstream f(*a.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << *a.out << '\n';
      return kExitUsage;
    }
    f << text;
  } else {
    out << text;
  }
  if (!report.pass()) {
    err << "check failed: " << report.failures().size() << " of " << report.trials()
        << " trials above tolerance\n";
    return kExitCheckFailed;
  }
  return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tensor-network and channel entanglement toolkit", "ent-evolve"};
  app.require_subcommand(1);

  std::string file;
  std::string strategy = "greedy";
  bool stats = false;
  auto* contract = app.add_subcommand("contract", "Evaluate a network file");
  contract->add_option("file", file, "Network JSON")->required();
  contract->add_option("--plan", strategy, "Contraction planner")
      ->check(CLI::IsMember({"greedy", "exhaustive"}));
  contract->add_flag("--stats", stats, "Include plan cost and steps");

  auto* rewrite = app.add_subcommand("rewrite", "Normalize deltas and snakes");
  rewrite->add_option("file", file, "Network JSON")->required();

  VerifyArgs v;
  auto* verify = app.add_subcommand("verify", "Run a seeded verification campaign");
  verify->add_option("check", v.check,
                     "factorization|upper-bound|duality|sl-invariance|lemma|choi")
      ->required();
  verify->add_option("--dim", v.dim, "Local dimension");
  verify->add_option("--trials", v.trials, "Number of trials");
  verify->add_option("--seed", v.seed, "Base seed")->required();
  verify->add_option("--mode", v.mode, "Factorization mode");
  verify->add_option("--tolerance", v.tolerance, "Residual tolerance");
  verify->add_option("--out", v.out, "Write the report here instead of stdout");
  verify->add_option("--format", v.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  verify->add_option("--threads", v.threads, "Worker threads (capped by ENT_EVOLVE_THREADS)")
      ->check(CLI::PositiveNumber);
  verify->add_option("--budget", v.budget, "Decompositions sampled per convex roof");

  auto* gconc = app.add_subcommand("gconc", "G-concurrence of a pure state");
  gconc->add_option("file", file, "State JSON or network JSON")->required();

  auto* choi = app.add_subcommand("choi", "Choi state of a channel");
  choi->add_option("file", file, "Channel JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (contract->parsed()) return cmd_contract(file, strategy, stats, out);
    if (rewrite->parsed()) return cmd_rewrite(file, out);
    if (verify->parsed()) return cmd_verify(v, out, err);
    if (gconc->parsed()) return cmd_gconc(file, out);
    if (choi->parsed()) return cmd_choi(file, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Format ? kExitUsage : kExitSemantic;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace entevolve
