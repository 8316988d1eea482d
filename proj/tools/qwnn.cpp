// qwnn: command-line harness for the walks, the weight search, the
// backpropagation baseline and the reproduction suite.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qwnn/qwnn.hpp"
#include "qwnn/reproduce.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON config files. Top-level keys apply to the selected subcommand; an
// object keyed by a subcommand name applies to that subcommand.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        j[name] = res.size() == 1 ? json(res.front()) : json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<std::string> parents;
    for (const CLI::App* sub : root_->get_subcommands()) parents = {sub->get_name()};
    std::vector<CLI::ConfigItem> items;
    collect(j, parents, items);
    return items;
  }

 private:
  void collect(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) const {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object() && root_->get_subcommand_no_throw(key) != nullptr) {
        // Only the selected subcommand's section matters.
        if (!parents.empty() && parents.front() == key) collect(value, parents, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      std::replace(item.name.begin(), item.name.end(), '_', '-');
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config values must be strings, numbers, booleans or arrays of those");
  }

  const CLI::App* root_;
};

fs::path default_out_dir() {
  if (const char* env = std::getenv("QWNN_OUT_DIR"); env && *env) return env;
  return ".";
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot open " + path.string() + " for writing");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw RuntimeFailure("failed writing " + path.string());
}

// Reproducibility record written next to every output file.
struct RunManifest {
  std::string subcommand;
  json config;
  std::uint64_t seed = 0;
  std::vector<fs::path> outputs;

  json to_json() const {
    json paths = json::array();
    for (const auto& p : outputs) paths.push_back(p.generic_string());
    return {{"subcommand", subcommand}, {"config", config}, {"seed", seed}, {"version", qwnn::version}, {"outputs", paths}};
  }

  void write_all() const {
    const std::string text = to_json().dump(2) + "\n";
    for (const auto& p : outputs) write_text(fs::path(p.string() + ".manifest.json"), text);
  }
};

std::string csv_text(const std::function<void(std::ostream&)>& fill) {
  std::ostringstream os;
  fill(os);
  return os.str();
}

// ---------------------------------------------------------------------------

struct Walk1dArgs {
  std::uint64_t steps = 100;
  std::string init = "asymmetric";
  std::string out;
};

int cmd_walk1d(const Walk1dArgs& a) {
  auto state = a.init == "symmetric" ? qwnn::init_1d_symmetric() : qwnn::init_1d_asymmetric();
  state = qwnn::evolve_1d(std::move(state), a.steps);
  const fs::path out = a.out.empty() ? default_out_dir() / "walk1d.csv" : fs::path(a.out);
  write_text(out, csv_text([&](std::ostream& os) { qwnn::write_distribution_csv(os, qwnn::distribution_1d(state)); }));
  RunManifest{"walk1d", {{"steps", a.steps}, {"init", a.init}, {"out", out.generic_string()}}, 0, {out}}.write_all();
  return 0;
}

struct WalkNdArgs {
  std::size_t dims = 2;
  std::uint64_t steps = 10;
  std::size_t coin_index = 0;
  std::string out;
};

int cmd_walknd(const WalkNdArgs& a) {
  if (a.coin_index >= (std::size_t{1} << a.dims)) throw std::invalid_argument("--coin-index must be below 2^dims");
  const auto coin = qwnn::CoinMatrix::hadamard_power(a.dims);
  const auto state = qwnn::evolve_nd(qwnn::init_nd_localized(a.dims, a.coin_index), coin, a.steps);
  const fs::path out = a.out.empty() ? default_out_dir() / "walknd.csv" : fs::path(a.out);
  write_text(out, csv_text([&](std::ostream& os) { qwnn::write_distribution_csv(os, qwnn::distribution_nd(state), a.dims); }));
  RunManifest{"walknd",
              {{"dims", a.dims}, {"steps", a.steps}, {"coin_index", a.coin_index}, {"coin", "hadamard"}, {"out", out.generic_string()}},
              0,
              {out}}
      .write_all();
  return 0;
}

struct WalkcArgs {
  std::uint64_t N = 0;
  std::uint64_t k = 0;
  std::uint64_t l = 1;
  std::optional<std::uint64_t> steps;
  std::string rounding = "ceiling";
  std::string out;
};

int cmd_walkc(const WalkcArgs& a) {
  const qwnn::WalkParams p{a.N, a.k, a.l};
  p.validate();
  const auto sc = qwnn::steps_to_max(p, qwnn::parse_rounding(a.rounding));
  const std::uint64_t steps = a.steps.value_or(sc.t_int);
  const fs::path out = a.out.empty() ? default_out_dir() / "walkc.csv" : fs::path(a.out);
  write_text(out, csv_text([&](std::ostream& os) { qwnn::write_probability_trace_csv(os, p, steps); }));
  RunManifest{"walkc",
              {{"N", a.N}, {"k", a.k}, {"l", a.l}, {"steps", steps}, {"rounding", a.rounding}, {"t_theoretical", sc.t_real},
               {"out", out.generic_string()}},
              0,
              {out}}
      .write_all();
  std::cout << "t_theoretical=" << qwnn::format_real(sc.t_real) << " steps=" << steps << '\n';
  return 0;
}

struct TrainArgs {
  qwnn::TrainerConfig cfg;
  std::string rounding = "ceiling";
  std::vector<std::int64_t> origin;
  std::size_t runs = 1;
  unsigned jobs = 1;
  bool allow_large = false;
  bool dry_run = false;
  std::optional<std::uint64_t> k;
  std::string out;
};

json trainer_config_json(const qwnn::TrainerConfig& c, const std::string& rounding) {
  json j{{"delta_p", c.delta_p}, {"z", c.z}, {"w", c.w}, {"l", c.l}, {"seed", c.seed}, {"rounding", rounding},
         {"max_window_shifts", c.max_window_shifts}, {"count_noise", c.count_noise}, {"jobs", c.enumeration.jobs},
         {"allow_large", c.enumeration.allow_large}};
  j["origin"] = c.origin ? json(*c.origin) : json(nullptr);
  return j;
}

int cmd_train(TrainArgs a) {
  auto& cfg = a.cfg;
  cfg.rounding = qwnn::parse_rounding(a.rounding);
  if (!a.origin.empty()) cfg.origin = a.origin;
  cfg.enumeration.jobs = a.jobs;
  cfg.enumeration.allow_large = a.allow_large;
  cfg.validate();

  if (a.dry_run) {
    // Step count only; the walk is never evolved.
    const std::uint64_t n = qwnn::window_size(cfg.z, cfg.w);
    std::uint64_t k = 0;
    if (a.k) {
      k = *a.k;
    } else {
      const auto start = cfg.origin ? qwnn::WeightWindow{cfg.w, cfg.z, cfg.delta_p, *cfg.origin}
                                    : qwnn::random_window(cfg.w, cfg.z, cfg.delta_p, qwnn::derive_seed(cfg.seed, "window"));
      qwnn::ShiftSequence shifts(cfg.w);
      for (;;) {
        k = qwnn::enumerate_solutions(qwnn::apply_offset(start, shifts.offset()), cfg.enumeration).k();
        if (k > 0) break;
        if (shifts.position() >= cfg.max_window_shifts) throw RuntimeFailure("no solvable window within the shift limit");
        shifts.advance();
      }
    }
    const auto sc = qwnn::steps_to_max({n, k, cfg.l}, cfg.rounding);
    std::cout << "N=" << n << " k=" << k << " t_theoretical=" << qwnn::format_real(sc.t_real) << " t_int=" << sc.t_int << '\n';
    return 0;
  }

  std::vector<qwnn::TrainerConfig> configs(a.runs, cfg);
  for (std::size_t i = 0; i < a.runs; ++i) configs[i].seed = cfg.seed + i;
  std::vector<qwnn::ExperimentResult> results(a.runs);
  // Parallelism goes either across runs or inside the oracle, not both.
  if (a.runs > 1) {
    for (auto& c : configs) c.enumeration.jobs = 1;
    qwnn::parallel_for(a.runs, a.jobs, [&](std::size_t i) { results[i] = qwnn::train(configs[i]); });
  } else if (a.runs == 1) {
    results[0] = qwnn::train(configs[0]);
  }

  const fs::path json_out = a.out.empty() ? default_out_dir() / "train.json" : fs::path(a.out);
  fs::path csv_out = json_out;
  csv_out.replace_extension(".csv");
  json arr = json::array();
  for (std::size_t i = 0; i < a.runs; ++i) {
    json r = results[i];
    r["seed"] = configs[i].seed;
    arr.push_back(std::move(r));
  }
  write_text(json_out, (a.runs == 1 ? arr.front() : arr).dump(2) + "\n");
  write_text(csv_out, csv_text([&](std::ostream& os) {
               qwnn::write_run_header(os);
               for (std::size_t i = 0; i < a.runs; ++i) qwnn::write_run_row(os, configs[i], results[i]);
             }));
  json mc = trainer_config_json(cfg, a.rounding);
  mc["runs"] = a.runs;
  mc["out"] = json_out.generic_string();
  RunManifest{"train", mc, cfg.seed, {json_out, csv_out}}.write_all();

  std::size_t failed = 0;
  for (std::size_t i = 0; i < a.runs; ++i) {
    const auto& r = results[i];
    if (r.status != qwnn::TrainStatus::measured) {
      ++failed;
      std::cerr << "seed " << configs[i].seed << ": no solvable window within " << cfg.max_window_shifts << " shifts\n";
      continue;
    }
    std::cout << "seed " << configs[i].seed << ": k=" << r.k << " N=" << r.N << " t=" << r.t_int << " outcome=" << qwnn::to_string(r.outcome)
              << " classification_error=" << r.classification_error << '\n';
  }
  return failed ? exit_runtime : 0;
}

struct BackpropArgs {
  qwnn::BackpropConfig cfg;
  std::size_t runs = 100;
  unsigned jobs = 1;
  std::string out;
};

int cmd_backprop(const BackpropArgs& a) {
  a.cfg.validate();
  std::vector<qwnn::BackpropConfig> configs(a.runs, a.cfg);
  for (std::size_t i = 0; i < a.runs; ++i) configs[i].seed = a.cfg.seed + i;
  std::vector<qwnn::TrainResult> results(a.runs);
  qwnn::parallel_for(a.runs, a.jobs, [&](std::size_t i) { results[i] = qwnn::backprop_train(configs[i]); });

  const fs::path out = a.out.empty() ? default_out_dir() / "backprop.csv" : fs::path(a.out);
  fs::path summary_out = out;
  summary_out.replace_extension(".summary.csv");
  write_text(out, csv_text([&](std::ostream& os) {
               qwnn::write_train_result_header(os);
               for (std::size_t i = 0; i < a.runs; ++i) qwnn::write_train_result_row(os, configs[i], results[i]);
             }));
  const auto s = qwnn::summarize(results);
  write_text(summary_out, csv_text([&](std::ostream& os) {
               qwnn::write_summary_header(os);
               if (a.runs > 0) qwnn::write_summary_row(os, a.cfg.learning_rate, s);
             }));
  RunManifest{"backprop",
              {{"lr", a.cfg.learning_rate}, {"runs", a.runs}, {"seed", a.cfg.seed}, {"max_epochs", a.cfg.max_epochs},
               {"stagnation_window", a.cfg.stagnation_window}, {"init_range", a.cfg.init_range}, {"jobs", a.jobs},
               {"out", out.generic_string()}},
              a.cfg.seed,
              {out, summary_out}}
      .write_all();
  std::cout << "runs=" << s.runs << " successful=" << s.successes << " epoch_limit=" << s.epoch_limit_hits
            << " stagnation=" << s.stagnations << " mean_epochs=" << qwnn::format_real(s.mean) << '\n';
  return 0;
}

struct ReproduceArgs {
  std::string out_dir;
  bool heavy = false;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  std::size_t bp_runs = 100;
  std::size_t train_runs = 1000;
  std::size_t searches = 2;
};

int cmd_reproduce(const ReproduceArgs& a) {
  const fs::path dir = a.out_dir.empty() ? default_out_dir() / "reproduce" : fs::path(a.out_dir);
  std::vector<fs::path> outputs;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    outputs.push_back(dir / name);
  };

  // Walk distributions after 100 steps.
  for (bool symmetric : {false, true}) {
    const auto s = qwnn::evolve_1d(symmetric ? qwnn::init_1d_symmetric() : qwnn::init_1d_asymmetric(), 100);
    emit(symmetric ? "walk1d_symmetric.csv" : "walk1d_asymmetric.csv",
         csv_text([&](std::ostream& os) { qwnn::write_distribution_csv(os, qwnn::distribution_1d(s)); }));
  }
  // Toy search: floor(pi) = 3 steps.
  {
    const qwnn::WalkParams toy{8, 2, 1};
    const auto t = qwnn::steps_to_max(toy, qwnn::Rounding::floor).t_int;
    emit("toy_trace.csv", csv_text([&](std::ostream& os) { qwnn::write_probability_trace_csv(os, toy, t); }));
  }

  qwnn::ReportInputs report;
  report.steps = qwnn::step_table();
  report.probabilities = qwnn::probability_table();
  emit("step_counts.csv", csv_text([&](std::ostream& os) { qwnn::write_step_table(os, report.steps); }));
  emit("class_probabilities.csv", csv_text([&](std::ostream& os) { qwnn::write_probability_table(os, report.probabilities); }));

  std::vector<std::int64_t> sizes{2, 4};
  if (a.heavy) sizes.push_back(8);
  for (auto z : sizes) {
    for (std::size_t i = 0; i < a.searches; ++i) {
      qwnn::TrainerConfig cfg;
      cfg.z = z;
      cfg.seed = a.seed + i;
      cfg.enumeration = qwnn::EnumerationOptions{a.jobs, qwnn::default_vertex_cap, z == 8};
      report.searches.emplace_back(cfg, qwnn::train(cfg));
    }
  }
  emit("weight_searches.csv", csv_text([&](std::ostream& os) {
         qwnn::write_run_header(os);
         for (const auto& [cfg, r] : report.searches) qwnn::write_run_row(os, cfg, r);
       }));

  report.backprop = qwnn::backprop_table(a.bp_runs, a.seed, a.jobs);
  emit("backprop_outcomes.csv", csv_text([&](std::ostream& os) { qwnn::write_backprop_outcomes(os, report.backprop); }));
  emit("backprop_statistics.csv", csv_text([&](std::ostream& os) { qwnn::write_backprop_statistics(os, report.backprop); }));

  qwnn::AcceptanceOptions opt;
  opt.heavy = a.heavy;
  opt.jobs = a.jobs;
  opt.seed = a.seed;
  opt.training_runs = a.train_runs;
  report.criteria = qwnn::run_acceptance(opt);
  // Runtimes vary between runs; the report keeps them, the manifest does not promise them.
  emit("report.md", csv_text([&](std::ostream& os) { qwnn::write_report(os, report); }));

  RunManifest{"reproduce",
              {{"out_dir", dir.generic_string()}, {"heavy", a.heavy}, {"jobs", a.jobs}, {"seed", a.seed}, {"bp_runs", a.bp_runs},
               {"train_runs", a.train_runs}, {"searches", a.searches}},
              a.seed,
              outputs}
      .write_all();

  bool ok = true;
  for (const auto& c : report.criteria) {
    std::cout << "[" << qwnn::status_word(c) << "] criterion " << c.id << ": " << c.name << '\n';
    ok = ok && (c.passed || c.skipped);
  }
  std::cout << "report: " << (dir / "report.md").generic_string() << '\n';
  return ok ? 0 : exit_runtime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-walk weight search for a 2-2-1 XOR network"};
  app.set_version_flag("--version", std::string(qwnn::version));
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  // Lets --config appear after the subcommand name.
  app.fallthrough();

  auto out_help = "output path (default: $QWNN_OUT_DIR or the current directory)";

  Walk1dArgs w1;
  auto* walk1d = app.add_subcommand("walk1d", "Hadamard walk on the line; writes n,probability");
  walk1d->add_option("--steps", w1.steps, "number of steps")->capture_default_str();
  walk1d->add_option("--init", w1.init, "initial coin state")->check(CLI::IsMember({"asymmetric", "symmetric"}))->capture_default_str();
  walk1d->add_option("--out", w1.out, out_help);

  WalkNdArgs wn;
  auto* walknd = app.add_subcommand("walknd", "Hadamard-coined walk on the d-dimensional lattice");
  walknd->add_option("--dims", wn.dims, "lattice dimension")->check(CLI::Range(1, 10))->capture_default_str();
  walknd->add_option("--steps", wn.steps, "number of steps")->capture_default_str();
  walknd->add_option("--coin-index", wn.coin_index, "initial coin basis state")->capture_default_str();
  walknd->add_option("--out", wn.out, out_help);

  WalkcArgs wc;
  auto* walkc = app.add_subcommand("walkc", "lackadaisical search on the complete graph; writes t,p_AA,p_AB,p_BA,p_BB");
  walkc->add_option("-N,--N", wc.N, "number of vertices")->required();
  walkc->add_option("-k,--k", wc.k, "number of marked vertices")->required();
  walkc->add_option("-l,--l", wc.l, "self-loops per vertex")->capture_default_str();
  walkc->add_option("--steps", wc.steps, "steps to simulate (default: rounded optimum)");
  walkc->add_option("--rounding", wc.rounding, "floor, ceiling or nearest")->capture_default_str();
  walkc->add_option("--out", wc.out, out_help);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "search a weight window with the quantum walk");
  train->add_option("--delta-p", tr.cfg.delta_p, "lattice spacing")->capture_default_str();
  train->add_option("--z", tr.cfg.z, "points per dimension")->capture_default_str();
  train->add_option("--w", tr.cfg.w, "number of weights")->capture_default_str();
  train->add_option("--l", tr.cfg.l, "self-loops per vertex")->capture_default_str();
  train->add_option("--seed", tr.cfg.seed, "master seed (runs use seed, seed+1, ...)")->capture_default_str();
  train->add_option("--rounding", tr.rounding, "floor, ceiling or nearest")->capture_default_str();
  train->add_option("--max-window-shifts", tr.cfg.max_window_shifts, "give up after this many window shifts")->capture_default_str();
  train->add_option("--origin", tr.origin, "fixed starting window origin (w integers)");
  train->add_option("--count-noise", tr.cfg.count_noise, "relative std of the count fed to the walk")->capture_default_str();
  train->add_option("--runs", tr.runs, "number of seeded runs")->capture_default_str();
  train->add_option("--jobs", tr.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_flag("--allow-large", tr.allow_large, "lift the vertex cap on the oracle");
  train->add_flag("--dry-run", tr.dry_run, "print the step count without evolving the walk");
  train->add_option("--k", tr.k, "with --dry-run: use this count instead of running the oracle");
  train->add_option("--out", tr.out, "JSON output path; the CSV goes next to it");

  BackpropArgs bp;
  auto* backprop = app.add_subcommand("backprop", "gradient-descent baseline on XOR");
  backprop->add_option("--lr", bp.cfg.learning_rate, "learning rate")->capture_default_str();
  backprop->add_option("--runs", bp.runs, "number of seeded runs")->capture_default_str();
  backprop->add_option("--seed", bp.cfg.seed, "first seed")->capture_default_str();
  backprop->add_option("--max-epochs", bp.cfg.max_epochs, "epoch limit")->capture_default_str();
  backprop->add_option("--stagnation-window", bp.cfg.stagnation_window, "epochs without MSE improvement before stopping")
      ->capture_default_str();
  backprop->add_option("--init-range", bp.cfg.init_range, "initial weights drawn from [-r, r]")->capture_default_str();
  backprop->add_option("--jobs", bp.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  backprop->add_option("--out", bp.out, out_help);

  ReproduceArgs rp;
  auto* reproduce = app.add_subcommand("reproduce", "regenerate every table and figure and write a Markdown report");
  reproduce->add_option("--out-dir", rp.out_dir, "output directory (default: $QWNN_OUT_DIR/reproduce)");
  reproduce->add_flag("--heavy", rp.heavy, "include the z=8 window (134217728 vertices)");
  reproduce->add_option("--jobs", rp.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  reproduce->add_option("--seed", rp.seed, "first seed")->capture_default_str();
  reproduce->add_option("--bp-runs", rp.bp_runs, "backpropagation runs per learning rate")->capture_default_str();
  reproduce->add_option("--train-runs", rp.train_runs, "weight-search runs for the z=2 success check")->capture_default_str();
  reproduce->add_option("--searches", rp.searches, "reported weight searches per window size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*walk1d) return cmd_walk1d(w1);
    if (*walknd) return cmd_walknd(wn);
    if (*walkc) return cmd_walkc(wc);
    if (*train) return cmd_train(tr);
    if (*backprop) return cmd_backprop(bp);
    if (*reproduce) return cmd_reproduce(rp);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_usage;
}
