#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "faota/analytics.hpp"
#include "faota/curve.hpp"
#include "faota/dataset.hpp"
#include "faota/errors.hpp"
#include "faota/mlp.hpp"
#include "faota/montecarlo.hpp"
#include "faota/training.hpp"
#include "manifest.hpp"

namespace faota::cli {
namespace {

using ordered = nlohmann::ordered_json;

// Bookkeeping shared by every subcommand: output files, checks and the manifest.
class Run {
 public:
  Run(const Invocation& inv, nlohmann::json seed, std::ostream& err)
      : outputs_(inv.config.output_dir()), err_(err) {
    manifest_.command = inv.command;
    manifest_.arguments = inv.arguments;
    manifest_.config = inv.config.resolved();
    manifest_.seed = std::move(seed);
    manifest_.started = utc_now();
  }

  void write(const std::string& name, const std::string& content) { outputs_.write(name, content); }

  void check(const std::string& name, bool pass, ordered detail = ordered::object()) {
    ordered c;
    c["name"] = name;
    c["pass"] = pass;
    if (!detail.empty()) c["detail"] = std::move(detail);
    manifest_.checks.push_back(std::move(c));
    if (!pass) {
      failed_ = true;
      err_ << "FAIL " << name;
      if (!detail_text_.empty()) err_ << ": " << detail_text_;
      err_ << '\n';
    }
    detail_text_.clear();
  }

  // Text printed with the next failing check.
  Run& explain(std::string text) {
    detail_text_ = std::move(text);
    return *this;
  }

  // Band check for a ComparisonReport; prints the first failing grid point.
  void check_report(const std::string& name, const ComparisonReport& r) {
    ordered detail{{"points", r.points.size()}, {"sup_gap", r.sup_gap()}};
    if (const auto f = r.first_failure()) {
      std::ostringstream os;
      os << "x=" << format_double(f->x) << " empirical=" << format_double(f->empirical)
         << " analytic=" << format_double(f->analytic) << " stderr=" << format_double(f->std_error);
      explain(os.str());
      detail["first_failure"] = {{"x", f->x}, {"empirical", f->empirical}, {"analytic", f->analytic},
                                 {"stderr", f->std_error}};
    }
    check(name, r.passed(), std::move(detail));
  }

  int finish() {
    manifest_.exit_status = failed_ ? kExitCheckFailed : kExitPass;
    manifest_.finished = utc_now();
    write_manifest(outputs_, manifest_);
    return manifest_.exit_status;
  }

 private:
  OutputSet outputs_;
  RunManifest manifest_;
  std::ostream& err_;
  std::string detail_text_;
  bool failed_ = false;
};

template <class T>
std::string csv_of(const T& item) {
  std::ostringstream os;
  item.write_csv(os);
  return os.str();
}

std::string dump(const ordered& j) { return j.dump(2) + "\n"; }

// Two-sample band used for ordering checks between empirical curves.
double pair_band(double se_a, double se_b) {
  return std::max(ComparisonReport::kSigmas * std::hypot(se_a, se_b), ComparisonReport::kFloor);
}

// Indices of the variants with a Kendall tau (Jakes has none), weakest dependence
// first. The closed forms predict curves ordered this way.
std::vector<std::size_t> by_dependence(const std::vector<DependenceSpec>& variants) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (expected_kendall_tau(variants[i])) idx.push_back(i);
  }
  std::ranges::stable_sort(idx, {}, [&](std::size_t i) { return *expected_kendall_tau(variants[i]); });
  return idx;
}

// Checks that reports[a] >= reports[b] pointwise for each consecutive pair in
// `order`: exactly for the closed forms, within the two-sample band empirically.
void check_ordering(Run& run, const std::string& what, const std::vector<VariantComparison>& res,
                    const std::vector<std::size_t>& order) {
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& hi = res[order[k - 1]];
    const auto& lo = res[order[k]];
    bool analytic_ok = true;
    bool empirical_ok = true;
    std::string where;
    for (std::size_t i = 0; i < hi.report.points.size(); ++i) {
      const auto& a = hi.report.points[i];
      const auto& b = lo.report.points[i];
      const bool aok = a.analytic + 1e-12 >= b.analytic;
      const bool eok = a.empirical + pair_band(a.std_error, b.std_error) >= b.empirical;
      if ((!aok || !eok) && where.empty()) {
        std::ostringstream os;
        os << "x=" << format_double(a.x) << " " << hi.variant << " (analytic "
           << format_double(a.analytic) << ", empirical " << format_double(a.empirical) << ") < "
           << lo.variant << " (analytic " << format_double(b.analytic) << ", empirical "
           << format_double(b.empirical) << ")";
        where = os.str();
      }
      analytic_ok = analytic_ok && aok;
      empirical_ok = empirical_ok && eok;
    }
    run.explain(where).check(what + " " + hi.variant + " >= " + lo.variant,
                             analytic_ok && empirical_ok,
                             {{"analytic", analytic_ok}, {"empirical", empirical_ok}});
  }
}

ordered comparison_json(const VariantComparison& v) {
  return {{"variant", v.variant}, {"report", v.report.to_json()}, {"analytic", v.analytic.to_json()}};
}

int cmd_cdf_mse(const Invocation& inv, std::ostream& log, std::ostream& err) {
  auto plan = inv.config.mc_plan();
  if (plan.tau_grid.empty()) plan.tau_grid = default_tau_grid(plan.p_max);
  Run run(inv, plan.seed, err);
  log << "cdf-mse: K=" << plan.users << " N=" << plan.ports << " |S|=" << plan.selected << ", "
      << plan.trials << " trials\n";
  const auto res = run_mse_cdf_experiment(plan);

  ordered out{{"users", plan.users}, {"ports", plan.ports}, {"selected", plan.selected},
              {"p_max", plan.p_max}, {"trials", plan.trials}, {"variants", ordered::array()}};
  for (const auto& v : res) {
    run.write("cdf_mse_" + v.variant + ".csv", csv_of(v.report));
    run.write("cdf_mse_" + v.variant + "_analytic.csv", csv_of(v.analytic));
    out["variants"].push_back(comparison_json(v));
    run.check_report("cdf-mse band " + v.variant, v.report);
    log << "  " << v.variant << ": sup gap " << format_double(v.report.sup_gap()) << '\n';
  }
  run.write("cdf_mse.json", dump(out));
  check_ordering(run, "cdf-mse ordering", res, by_dependence(plan.variants));
  return run.finish();
}

int cmd_pmf_users(const Invocation& inv, std::ostream& log, std::ostream& err) {
  const auto plan = inv.config.mc_plan();
  Run run(inv, plan.seed, err);
  log << "pmf-users: K=" << plan.users << " N=" << plan.ports << " tau=" << plan.tau << ", "
      << plan.trials << " trials\n";
  const auto res = run_participation_experiment(plan);

  ordered out{{"users", plan.users}, {"ports", plan.ports}, {"tau", plan.tau},
              {"threshold", plan.sigma2 / (plan.p_max * plan.tau)}, {"trials", plan.trials},
              {"variants", ordered::array()}};
  for (const auto& p : res) {
    run.write("pmf_users_" + p.variant + ".csv", csv_of(p.pmf));
    out["variants"].push_back({{"variant", p.variant},
                               {"qualify_probability", p.qualify_probability},
                               {"mean_empirical", p.mean_empirical},
                               {"mean_analytic", p.mean_analytic},
                               {"mean_stderr", p.mean_stderr},
                               {"mode_empirical", p.mode_empirical},
                               {"report", p.pmf.to_json()},
                               {"analytic", p.analytic.to_json()}});
    run.check_report("pmf-users band " + p.variant, p.pmf);
    std::ostringstream os;
    os << "empirical mean " << format_double(p.mean_empirical) << " vs K q "
       << format_double(p.mean_analytic) << " (stderr " << format_double(p.mean_stderr) << ")";
    run.explain(os.str()).check("pmf-users mean " + p.variant, p.mean_pass,
                                {{"empirical", p.mean_empirical}, {"analytic", p.mean_analytic}});
    log << "  " << p.variant << ": q=" << format_double(p.qualify_probability) << " mode "
        << p.mode_empirical << '\n';
  }
  run.write("pmf_users.json", dump(out));
  return run.finish();
}

int cmd_port_sweep(const Invocation& inv, std::ostream& log, std::ostream& err) {
  const auto plan = inv.config.mc_plan();
  Run run(inv, plan.seed, err);
  log << "port-sweep: K=" << plan.users << " tau=" << plan.tau << ", " << plan.trials << " trials\n";
  const auto res = run_port_sweep(plan);

  ordered out{{"users", plan.users}, {"tau", plan.tau}, {"trials", plan.trials},
              {"variants", ordered::array()}};
  for (const auto& v : res) {
    run.write("port_sweep_" + v.variant + ".csv", csv_of(v.report));
    out["variants"].push_back(comparison_json(v));
    run.check_report("port-sweep band " + v.variant, v.report);

    bool analytic_ok = true;
    bool empirical_ok = true;
    const auto& pts = v.report.points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      analytic_ok = analytic_ok && pts[i].analytic + 1e-15 >= pts[i - 1].analytic;
      empirical_ok = empirical_ok &&
                     pts[i].empirical + pair_band(pts[i].std_error, pts[i - 1].std_error) >=
                         pts[i - 1].empirical;
    }
    run.check("port-sweep nondecreasing " + v.variant, analytic_ok && empirical_ok,
              {{"analytic", analytic_ok}, {"empirical", empirical_ok}});
  }
  run.write("port_sweep.json", dump(out));

  const auto independent = std::ranges::find_if(
      plan.variants, [](const DependenceSpec& d) { return std::holds_alternative<Independent>(d); });
  if (independent != plan.variants.end()) {
    const auto& top = res[static_cast<std::size_t>(independent - plan.variants.begin())];
    for (const auto& v : res) {
      if (&v == &top) continue;
      bool ok = true;
      for (std::size_t i = 0; i < v.report.points.size(); ++i) {
        const auto& a = top.report.points[i];
        const auto& b = v.report.points[i];
        ok = ok && a.analytic + 1e-12 >= b.analytic &&
             a.empirical + pair_band(a.std_error, b.std_error) >= b.empirical;
      }
      run.check("port-sweep " + top.variant + " dominates " + v.variant, ok);
    }
  }
  if (!res.empty() && !res[0].report.points.empty() && res[0].report.points[0].x == 1.0) {
    const auto& first = res[0].report.points[0];
    bool ok = true;
    for (const auto& v : res) {
      const auto& p = v.report.points[0];
      ok = ok && std::fabs(p.empirical - first.empirical) <= pair_band(p.std_error, first.std_error);
    }
    run.check("port-sweep N=1 coincides across variants", ok);
  }
  log << "  " << res.size() << " variants x " << (res.empty() ? 0 : res[0].report.points.size())
      << " port counts\n";
  return run.finish();
}

int cmd_copula_check(const Invocation& inv, std::ostream& log, std::ostream& err) {
  const auto plan = inv.config.mc_plan();
  Run run(inv, plan.seed, err);
  log << "copula-check: N=" << plan.ports << ", " << plan.trials << " rows per variant\n";
  const auto diag = run_copula_diagnostics(plan);

  ordered out{{"ports", plan.ports}, {"rows", plan.trials}, {"variants", ordered::array()},
              {"jakes_cross_check", diag.jakes_cross_check}};
  for (const auto& d : diag.variants) {
    ordered v{{"variant", d.variant}, {"ks_max", d.ks_max}, {"ks_critical", d.ks_critical},
              {"ks_pass", d.ks_pass}};
    v["kendall_tau"] = d.kendall_tau ? ordered(*d.kendall_tau) : ordered(nullptr);
    v["kendall_tau_expected"] = d.kendall_tau_expected ? ordered(*d.kendall_tau_expected) : ordered(nullptr);
    v["tau_pass"] = d.tau_pass;
    if (d.max_cdf) {
      v["max_cdf"] = d.max_cdf->to_json();
      run.write("copula_max_cdf_" + d.variant + ".csv", csv_of(*d.max_cdf));
    }
    out["variants"].push_back(std::move(v));

    std::ostringstream ks;
    ks << "max KS " << format_double(d.ks_max) << " >= critical " << format_double(d.ks_critical);
    run.explain(ks.str()).check("copula-check marginal KS " + d.variant, d.ks_pass);
    if (d.kendall_tau_expected) {
      std::ostringstream tau;
      tau << "tau " << format_double(*d.kendall_tau) << " vs " << format_double(*d.kendall_tau_expected);
      run.explain(tau.str()).check("copula-check Kendall tau " + d.variant, d.tau_pass);
    }
    if (d.max_cdf) run.check_report("copula-check max-CDF band " + d.variant, *d.max_cdf);
    log << "  " << d.variant << ": KS " << format_double(d.ks_max);
    if (d.kendall_tau) log << ", tau " << format_double(*d.kendall_tau);
    log << '\n';
  }
  run.write("copula_check.json", dump(out));
  return run.finish();
}

// --- train ------------------------------------------------------------------

TrainTestSplit load_data(const Config& cfg, std::ostream& err) {
  const auto source = cfg.at("fl.data.source").get<std::string>();
  const double fraction = cfg.at("fl.data.train_fraction").get<double>();
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("config key 'fl.data.train_fraction' must lie in (0, 1)");
  }
  RngStream rng(cfg.at("fl.data.seed").get<std::uint64_t>());

  if (source == "mnist") {
    const auto& images = cfg.at("fl.data.images");
    const auto& labels = cfg.at("fl.data.labels");
    std::vector<std::string> missing;
    for (const auto* p : {&images, &labels}) {
      if (!p->is_string()) {
        missing.push_back(p == &images ? "(fl.data.images not set)" : "(fl.data.labels not set)");
      } else if (!std::filesystem::is_regular_file(p->get<std::string>())) {
        missing.push_back(p->get<std::string>());
      }
    }
    if (missing.empty()) {
      const auto ip = images.get<std::string>();
      const auto lp = labels.get<std::string>();
      try {
        return ingest_mnist(ip, lp, fraction, rng);
      } catch (const ParseError& e) {
        throw IoError("cannot parse MNIST files " + ip + ", " + lp + ": " + e.what());
      } catch (const ValidationError& e) {
        throw IoError("MNIST files " + ip + ", " + lp + " do not match: " + e.what());
      }
    }
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    if (!cfg.at("fl.data.fallback").get<bool>()) {
      throw IoError("MNIST data not found: " + list +
                    ". Point fl.data.images / fl.data.labels at the IDX files (for example "
                    "train-images-idx3-ubyte and train-labels-idx1-ubyte), or run with "
                    "--set fl.data.source=synthetic, or --set fl.data.fallback=true");
    }
    err << "warning: MNIST data not found (" << list << "); using the synthetic task\n";
  } else if (source != "synthetic") {
    throw ConfigError("config key 'fl.data.source' must be \"synthetic\" or \"mnist\"");
  }

  const auto classes = cfg.at("fl.data.classes").get<long long>();
  const auto dims = cfg.at("fl.data.dims").get<std::size_t>();
  const auto samples = cfg.at("fl.data.samples").get<std::size_t>();
  const double separation = cfg.at("fl.data.separation").get<double>();
  try {
    const auto data = synthesize_dataset(static_cast<int>(classes), dims, samples, separation, rng);
    return split_dataset(data, fraction, rng);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config section 'fl.data': ") + e.what());
  }
}

struct SeedRun {
  std::vector<RoundRecord> records;
  bool diverged = false;
};

int cmd_train(const Invocation& inv, std::ostream& log, std::ostream& err) {
  const auto& cfg = inv.config;
  const auto base = cfg.fl_config();
  const auto seeds = cfg.fl_seeds();
  const auto variants = inv.ideal_only ? std::vector<std::string>{"ideal"} : cfg.fl_variants();
  const auto ota = cfg.ota_config();
  const double beta = cfg.at("system.beta").get<double>();
  const auto ports = cfg.at("system.N").get<std::size_t>();
  if (ports < 1) throw ConfigError("config key 'system.N' must be >= 1");

  const auto data = load_data(cfg, err);
  std::vector<std::size_t> layers{data.train.dims()};
  layers.insert(layers.end(), base.hidden.begin(), base.hidden.end());
  layers.push_back(static_cast<std::size_t>(data.train.n_classes));
  const std::size_t d = Mlp(layers).parameter_count();
  if (const auto& dj = cfg.at("system.d"); !dj.is_null() && dj.get<std::size_t>() != d) {
    throw ConfigError("config key 'system.d' is " + dj.dump() + " but the model has " +
                      std::to_string(d) + " parameters");
  }

  Run run(inv, seeds, err);
  log << "train: K=" << base.clients << " T=" << base.rounds << " d=" << d << ", "
      << data.train.size() << " train / " << data.test.size() << " test samples, " << seeds.size()
      << " seed(s)\n";

  std::ostringstream summary;
  summary << "variant,seed,rounds,final_train_loss,final_test_acc,mean_participants\n";
  ordered out{{"parameters", d}, {"variants", ordered::array()}};

  for (const auto& name : variants) {
    FlConfig fl = base;
    ChannelSpec channel{ports, Independent{}};
    std::string label = "ideal";
    if (name == "ideal") {
      fl.mode = AggregationMode::Ideal;
    } else {
      channel.dependence = parse_variant(name, beta);
      label = dependence_label(channel.dependence);
    }
    double acc_sum = 0.0;
    std::size_t finished = 0;
    bool full_participation = true;
    for (const auto seed : seeds) {
      fl.seed = seed;
      SeedRun sr;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        run_training(fl, ota, channel, data.train, data.test,
                     [&](const RoundRecord& r) { sr.records.push_back(r); });
      } catch (const TrainingError& e) {
        sr.diverged = true;
        std::ostringstream os;
        os << e.what() << "; last valid round "
           << (sr.records.empty() ? std::string("none") : std::to_string(sr.records.back().round));
        run.explain(os.str());
      }
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

      std::ostringstream csv;
      std::ostringstream jsonl;
      write_round_csv_header(csv);
      double participants = 0.0;
      for (const auto& r : sr.records) {
        write_round_csv(csv, r);
        write_round_jsonl(jsonl, r);
        participants += static_cast<double>(r.participants);
        if (fl.mode == AggregationMode::Ideal && r.participants != fl.clients) full_participation = false;
      }
      const auto stem = "train_" + label + "_seed" + std::to_string(seed);
      run.write(stem + ".csv", csv.str());
      run.write(stem + ".jsonl", jsonl.str());
      run.check("train " + label + " seed " + std::to_string(seed) + " finite", !sr.diverged,
                {{"rounds", sr.records.size()}});

      if (!sr.records.empty()) {
        const auto& last = sr.records.back();
        summary << label << ',' << seed << ',' << sr.records.size() << ','
                << format_double(last.train_loss) << ',' << format_double(last.test_accuracy) << ','
                << format_double(participants / static_cast<double>(sr.records.size())) << '\n';
        if (!sr.diverged) {
          acc_sum += last.test_accuracy;
          ++finished;
        }
        log << "  " << label << " seed " << seed << ": test acc "
            << format_double(last.test_accuracy) << " (" << static_cast<long long>(ms) << " ms)\n";
      }
    }
    if (fl.mode == AggregationMode::Ideal) {
      run.check("train ideal full participation", full_participation);
    }
    out["variants"].push_back(
        {{"variant", label},
         {"mean_final_test_acc", finished ? ordered(acc_sum / static_cast<double>(finished)) : ordered(nullptr)},
         {"seeds", finished}});
  }
  run.write("train_summary.csv", summary.str());
  run.write("train_summary.json", dump(out));
  return run.finish();
}

// --- bound ------------------------------------------------------------------

ScheduleEntry entry_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.is_object() || !j.contains("participants") || !j.contains("mse")) {
    throw ConfigError("config key '" + key + "' entries need \"participants\" and \"mse\"");
  }
  ScheduleEntry e;
  try {
    e.participants = j.at("participants").get<std::size_t>();
    e.mse = j.at("mse").is_null() ? std::nan("") : j.at("mse").get<double>();
    if (j.contains("members")) e.members = j.at("members").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has a malformed entry: " + j.dump());
  }
  return e;
}

std::vector<ScheduleEntry> read_schedule(const Config& cfg, std::string& source) {
  const auto& inline_schedule = cfg.at("bound.schedule");
  const auto& records = cfg.at("bound.records");
  const auto& constant = cfg.at("bound.constant");
  const int given = !inline_schedule.is_null() + !records.is_null() + !constant.is_null();
  if (given != 1) {
    throw ConfigError("set exactly one of 'bound.schedule', 'bound.records' or 'bound.constant'");
  }
  const auto rounds = cfg.at("bound.T").get<std::size_t>();
  if (rounds < 1) throw ConfigError("config key 'bound.T' must be >= 1");

  std::vector<ScheduleEntry> schedule;
  if (!inline_schedule.is_null()) {
    source = "inline";
    if (!inline_schedule.is_array()) throw ConfigError("config key 'bound.schedule' must be an array");
    for (const auto& e : inline_schedule) schedule.push_back(entry_from_json(e, "bound.schedule"));
  } else if (!records.is_null()) {
    if (!records.is_string()) throw ConfigError("config key 'bound.records' must be a file path");
    source = records.get<std::string>();
    std::ifstream in(source);
    if (!in) throw IoError("cannot read round records " + source);
    try {
      for (const auto& r : read_round_csv(in)) schedule.push_back({r.participants, r.mse, {}});
    } catch (const ParseError& e) {
      throw IoError("cannot parse round records " + source + ": " + e.what());
    }
  } else {
    source = "constant";
    schedule.assign(rounds, entry_from_json(constant, "bound.constant"));
  }
  if (schedule.size() > rounds) schedule.resize(rounds);
  return schedule;
}

int cmd_bound(const Invocation& inv, std::ostream& log, std::ostream& err) {
  const auto& cfg = inv.config;
  ConvergenceConstants c;
  const auto& lr = cfg.at("bound.lr");
  c.learning_rate = lr.is_null() ? cfg.at("fl.lr").get<double>() : lr.get<double>();
  c.pl_constant = cfg.at("bound.mu").get<double>();
  c.smoothness = cfg.at("bound.L").get<double>();
  c.gradient_bound = cfg.at("bound.kappa").get<double>();
  c.gradient_variance = cfg.at("bound.sigma_g2").get<double>();
  const auto& users = cfg.at("bound.K");
  c.users = users.is_null() ? cfg.at("system.K").get<std::size_t>() : users.get<std::size_t>();
  c.batch_sizes.assign(c.users, cfg.at("bound.batch").get<std::size_t>());
  const double initial_gap = cfg.at("bound.F1_gap").get<double>();
  if (!(initial_gap >= 0.0)) throw ConfigError("config key 'bound.F1_gap' must be >= 0");

  std::vector<std::string> warnings;
  try {
    warnings = c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config section 'bound': ") + e.what());
  }
  for (const auto& w : warnings) err << "warning: " << w << '\n';

  std::string source;
  const auto raw = read_schedule(cfg, source);
  std::vector<ScheduleEntry> schedule;
  std::size_t skipped = 0;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (raw[t].participants == 0 || !std::isfinite(raw[t].mse)) {
      err << "warning: schedule row " << t + 1 << " has no participants; skipped\n";
      ++skipped;
      continue;
    }
    schedule.push_back(raw[t]);
  }
  if (schedule.empty()) throw ConfigError("bound schedule has no rounds with participants");

  Run run(inv, nullptr, err);
  AnalyticCurve curve;
  try {
    curve.values = optimality_gap_curve(c, schedule, initial_gap);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("bound schedule: ") + e.what());
  }
  curve.abscissae.resize(curve.values.size());
  std::iota(curve.abscissae.begin(), curve.abscissae.end(), 1.0);
  curve.meta = {{"quantity", "optimality-gap bound"},
                {"abscissa", "T"},
                {"psi", c.contraction()},
                {"initial_gap", initial_gap},
                {"users", c.users},
                {"schedule", source},
                {"skipped_rounds", skipped}};
  run.write("bound.csv", csv_of(curve));
  run.write("bound.json", dump(ordered::parse(curve.to_json().dump())));

  const bool finite = std::ranges::all_of(curve.values, [](double v) { return std::isfinite(v) && v >= 0.0; });
  run.check("bound finite and nonnegative", finite);
  log << "bound: psi=" << format_double(c.contraction()) << ", " << schedule.size()
      << " rounds, final bound " << format_double(curve.values.back()) << '\n';
  return run.finish();
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"cdf-mse", "pmf-users", "port-sweep",
                                              "copula-check", "train", "bound"};
  return names;
}

int run_command(const Invocation& inv, std::ostream& log, std::ostream& err) {
  if (inv.command == "cdf-mse") return cmd_cdf_mse(inv, log, err);
  if (inv.command == "pmf-users") return cmd_pmf_users(inv, log, err);
  if (inv.command == "port-sweep") return cmd_port_sweep(inv, log, err);
  if (inv.command == "copula-check") return cmd_copula_check(inv, log, err);
  if (inv.command == "train") return cmd_train(inv, log, err);
  if (inv.command == "bound") return cmd_bound(inv, log, err);
  throw ConfigError("unknown command '" + inv.command + "'");
}

}  // namespace faota::cli
