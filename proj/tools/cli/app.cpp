#include "app.hpp"

#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "faota/errors.hpp"

#ifndef FAOTA_VERSION
#define FAOTA_VERSION "unknown"
#endif

namespace faota::cli {
namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::string benchmark;
  bool full_scale = false;
};

const char* describe(const std::string& name) {
  if (name == "cdf-mse") return "CDF of the normalized aggregation MSE: Monte Carlo vs closed form";
  if (name == "pmf-users") return "PMF of the number of participating devices";
  if (name == "port-sweep") return "Probability of full participation against the number of ports";
  if (name == "copula-check") return "Sampler diagnostics: marginals, Kendall tau, max-gain CDF";
  if (name == "train") return "Federated training over the simulated fluid-antenna uplink";
  return "Optimality-gap bound against the number of rounds";
}

Config resolve(const std::string& command, const Options& o) {
  Config cfg;
  if (!o.config_path.empty()) cfg.merge_file(o.config_path);
  if (o.full_scale) {
    const auto full = FlConfig::full_scale();
    cfg.set("fl.clients", full.clients);
    cfg.set("fl.rounds", full.rounds);
    cfg.set("fl.hidden", full.hidden);
    cfg.set("fl.batch", full.batch_size);
    cfg.set("fl.lr", full.learning_rate);
  }
  if (o.trials) cfg.set("mc.trials", *o.trials);
  if (o.threads) cfg.set("mc.threads", *o.threads);
  if (o.seed) {
    if (command == "train") {
      cfg.set("fl.seed", *o.seed);
      cfg.set("fl.seeds", nullptr);
    } else {
      cfg.set("mc.seed", *o.seed);
    }
  }
  if (o.out) cfg.set("output.dir", *o.out);
  for (const auto& s : o.sets) cfg.set(s);
  return cfg;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
  CLI::App app{"Fluid-antenna over-the-air federated learning simulator", "faota"};
  app.set_version_flag("--version", FAOTA_VERSION);
  app.require_subcommand(1);

  Options opts;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, describe(name));
    sub->add_option("-c,--config", opts.config_path, "JSON config file (must set system.tau)")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", opts.sets, "Override one key, e.g. --set system.N=20 (repeatable)")
        ->take_all();
    sub->add_option("-o,--out", opts.out, "Output directory (output.dir)");
    if (name == "train") {
      sub->add_option("--seed", opts.seed, "Training seed (fl.seed; clears fl.seeds)");
      sub->add_option("--benchmark", opts.benchmark, "Run only the named benchmark")
          ->check(CLI::IsMember({"ideal"}));
      sub->add_flag("--paper-scale,--full-scale", opts.full_scale,
                    "100 clients, 100 rounds, 200 hidden units, batch 32, lr 0.01; --set still wins");
    } else if (name != "bound") {
      sub->add_option("--trials", opts.trials, "Monte Carlo trials (mc.trials)");
      sub->add_option("--seed", opts.seed, "Master seed (mc.seed)");
      sub->add_option("--threads", opts.threads, "Worker threads, 0 = all cores (mc.threads)");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    log << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    log << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    log << FAOTA_VERSION << '\n';
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  Invocation inv;
  inv.command = app.get_subcommands().front()->get_name();
  inv.arguments = args;
  inv.ideal_only = opts.benchmark == "ideal";
  try {
    inv.config = resolve(inv.command, opts);
    return run_command(inv, log, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace faota::cli
