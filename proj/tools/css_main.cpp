// css: calibrated subset selection toolkit.
//
// Subcommands: generate (synthetic scored CSV), train (logistic model from a
// feature CSV), calibrate (threshold report for a calibration CSV), shortlist
// (apply a threshold to a pool CSV), experiment and diversity-experiment
// (Monte-Carlo sweeps with CSV/SVG output).

#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "css/harness.hpp"

namespace {

using namespace css;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

std::vector<MethodSpec> parse_methods(const std::string& text, std::size_t default_bins) {
  std::vector<MethodSpec> methods;
  for (const auto& token : split(text, ',')) {
    if (token == "umb") {
      MethodSpec spec{MethodKind::Umb};
      spec.bins = default_bins;
      methods.push_back(spec);
    } else {
      methods.push_back(parse_method(token));
    }
  }
  if (methods.empty()) throw BadParams("no methods given");
  return methods;
}

void parse_sweep(const std::string& text, ExperimentConfig& cfg) {
  if (text.empty()) return;
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw BadParams("--sweep expects axis=v1,v2,...");
  const std::string axis = text.substr(0, eq);
  if (axis == "noise") {
    cfg.sweep = SweepAxis::Noise;
  } else if (axis == "n") {
    cfg.sweep = SweepAxis::CalibrationSize;
  } else {
    throw BadParams("unknown sweep axis \"" + axis + "\" (use noise or n)");
  }
  for (const auto& v : split(text.substr(eq + 1), ',')) {
    cfg.sweep_values.push_back(std::stod(v));
  }
  if (cfg.sweep_values.empty()) throw BadParams("--sweep has no values");
}

// "maj=0,min=0.4" -> name/ratio pairs.
std::vector<std::pair<std::string, double>> parse_named_values(const std::string& text) {
  std::vector<std::pair<std::string, double>> out;
  if (text.empty()) return out;
  for (const auto& token : split(text, ',')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw BadParams("expected name=value, got \"" + token + "\"");
    out.emplace_back(token.substr(0, eq), std::stod(token.substr(eq + 1)));
  }
  return out;
}

std::vector<WorldGroup> build_groups(const std::string& weights_text,
                                     const std::string& noise_text) {
  const auto weights = parse_named_values(weights_text);
  const auto noises = parse_named_values(noise_text);
  std::vector<WorldGroup> groups;
  for (const auto& [name, w] : weights) groups.push_back({name, w, 0.0});
  for (const auto& [name, r] : noises) {
    bool found = false;
    for (auto& g : groups) {
      if (g.name == name) {
        g.noise_ratio = r;
        found = true;
      }
    }
    if (!found) throw BadParams("--group-noise names unknown group \"" + name + "\"");
  }
  return groups;
}

int run_generate(std::size_t n, double noise, const std::string& group_weights,
                 const std::string& group_noise, std::uint64_t seed, const std::string& out) {
  NoisyClassifierWorld world;
  world.noise_ratio = noise;
  if (!group_weights.empty()) world.groups = build_groups(group_weights, group_noise);
  world.validate();
  RandomSource rng = derive_stream(seed, 0);
  auto cal = sample_calibration(world, n, rng);
  write_scored_csv(out, cal.examples());
  std::cout << "wrote " << n << " examples to " << out << "\n";
  return 0;
}

int run_train(const std::string& data, const std::string& out, double lr, std::size_t epochs,
              double l2) {
  const auto rows = read_feature_csv(data);
  LogisticConfig config;
  config.learning_rate = lr;
  config.epochs = epochs;
  config.l2 = l2;
  const auto model = train_logistic(rows, config);
  write_model(out, model);
  std::cout << "trained on " << rows.size() << " rows, wrote " << out << "\n";
  return 0;
}

int run_calibrate(const std::string& data, double k, double m, double alpha, bool dynamic) {
  const auto cal = read_scored_csv(data);
  const CssResult result = dynamic ? css_threshold_dynamic(cal, k, m, alpha)
                                   : css_threshold(cal, {k, m, alpha});
  std::cout << "threshold=" << format_double(result.threshold) << "\n"
            << "epsilon=" << format_double(result.epsilon_used) << "\n"
            << "delta=" << format_double(result.delta_at_threshold) << "\n"
            << "feasible=" << (result.feasible ? 1 : 0) << "\n";
  return 0;
}

int run_shortlist(const std::string& pool_path, double threshold, const std::string& out) {
  const auto pool = read_pool_csv(pool_path);
  const auto shortlist = apply(ThresholdPolicy{threshold}, pool);
  std::ostringstream text;
  text << "index,score,decision\n";
  for (std::size_t i = 0; i < pool.size(); ++i) {
    text << i << ',' << format_double17(pool.scores[i]) << ','
         << static_cast<int>(shortlist.decisions[i]) << '\n';
  }
  if (out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream file(out);
    if (!file) throw IoError("cannot open " + out + " for writing");
    file << text.str();
    std::cout << "selected " << shortlist.realized_size << " of " << pool.size() << " -> " << out
              << "\n";
  }
  return 0;
}

int run_experiment(ExperimentConfig cfg, const std::string& out, const std::string& svg,
                   const std::string& svg_metric) {
  const auto table = run_sweep(cfg);
  if (!out.empty()) {
    emit_csv(table, out);
    std::cout << "wrote " << out << "\n";
  } else {
    std::cout << results_to_csv(table);
  }
  if (!svg.empty()) {
    const std::string x_label = cfg.sweep == SweepAxis::CalibrationSize ? "n" : "noise";
    emit_svg_lines(table, x_label, svg_metric, svg);
    std::cout << "wrote " << svg << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calibrated subset selection toolkit"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "sample a synthetic scored CSV");
  std::size_t gen_n = 10000;
  double gen_noise = 0.0;
  std::string gen_weights, gen_group_noise, gen_out = "calibration.csv";
  std::uint64_t gen_seed = 1;
  generate->add_option("--n", gen_n, "number of examples");
  generate->add_option("--noise", gen_noise, "classifier noise ratio");
  generate->add_option("--group-weights", gen_weights, "grouped world, e.g. maj=0.7,min=0.3");
  generate->add_option("--group-noise", gen_group_noise, "per-group noise, e.g. maj=0,min=0.4");
  generate->add_option("--seed", gen_seed, "master seed");
  generate->add_option("--out", gen_out, "output CSV path");

  // train
  auto* train = app.add_subcommand("train", "train a logistic model on a feature CSV");
  std::string train_data, train_out = "model.txt";
  double train_lr = 0.1, train_l2 = 1e-4;
  std::size_t train_epochs = 500;
  train->add_option("--data", train_data, "feature CSV (label,f1,...[,group])")->required();
  train->add_option("--out", train_out, "model output path");
  train->add_option("--lr", train_lr, "learning rate");
  train->add_option("--epochs", train_epochs, "epochs");
  train->add_option("--l2", train_l2, "L2 penalty");

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "compute the screening threshold");
  std::string cal_data;
  double cal_k = 5.0, cal_m = 100.0, cal_alpha = 0.1;
  bool cal_dynamic = false;
  calibrate->add_option("--data", cal_data, "calibration CSV (score,label[,group])")->required();
  calibrate->add_option("--k", cal_k, "target expected qualified count");
  calibrate->add_option("--m", cal_m, "pool size (or E[M] with --dynamic-m)");
  calibrate->add_option("--alpha", cal_alpha, "failure probability");
  calibrate->add_flag("--dynamic-m", cal_dynamic, "treat --m as the expected pool size");

  // shortlist
  auto* shortlist = app.add_subcommand("shortlist", "apply a saved threshold to a pool CSV");
  std::string sl_pool, sl_out;
  double sl_threshold = 1.0;
  shortlist->add_option("--pool", sl_pool, "pool CSV (score,label[,group])")->required();
  shortlist->add_option("--threshold", sl_threshold, "decision threshold")->required();
  shortlist->add_option("--out", sl_out, "decisions CSV path (default: stdout)");

  // experiment / diversity-experiment share most flags.
  ExperimentConfig cfg;
  std::string exp_methods = "css";
  std::string exp_sweep, exp_out, exp_svg, exp_svg_metric = "EQ";
  std::string exp_group_weights, exp_group_noise, exp_sweep_group;
  std::size_t exp_bins = 10;

  auto add_experiment_flags = [&](CLI::App* cmd) {
    cmd->add_option("--method", exp_methods,
                    "comma list of css,css-div,umb-B,uncalibrated,platt,isotonic");
    cmd->add_option("--k", cfg.k, "target expected qualified count");
    cmd->add_option("--m", cfg.m, "pool size");
    cmd->add_option("--alpha", cfg.alpha, "failure probability");
    cmd->add_option("--n-cal", cfg.n_cal, "calibration set size");
    cmd->add_option("--noise", cfg.noise, "classifier noise ratio");
    cmd->add_option("--bins", exp_bins, "bins for --method umb");
    cmd->add_option("--runs", cfg.runs, "independent runs per sweep point");
    cmd->add_option("--test-pools", cfg.test_pools, "pools per run");
    cmd->add_option("--seed", cfg.master_seed, "master seed");
    cmd->add_option("--threads", cfg.threads, "worker threads (default 1)");
    cmd->add_option("--sweep", exp_sweep, "axis=v1,v2,... with axis in {noise,n}");
    cmd->add_option("--out", exp_out, "results CSV path (default: stdout)");
    cmd->add_option("--svg", exp_svg, "line-chart SVG path");
    cmd->add_option("--svg-metric", exp_svg_metric, "EQ or SS (default EQ)");
  };

  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo method comparison");
  add_experiment_flags(experiment);

  auto* diversity = app.add_subcommand("diversity-experiment",
                                       "two-group experiment with per-group metrics");
  add_experiment_flags(diversity);
  diversity->add_option("--group-weights", exp_group_weights,
                        "group weights (default maj=0.7,min=0.3)");
  diversity->add_option("--group-noise", exp_group_noise, "per-group noise ratios");
  diversity->add_option("--sweep-group", exp_sweep_group,
                        "group driven by a noise sweep (default min)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit cleanly, bad flags are config errors
  }

  try {
    if (generate->parsed()) {
      return run_generate(gen_n, gen_noise, gen_weights, gen_group_noise, gen_seed, gen_out);
    }
    if (train->parsed()) {
      return run_train(train_data, train_out, train_lr, train_epochs, train_l2);
    }
    if (calibrate->parsed()) {
      return run_calibrate(cal_data, cal_k, cal_m, cal_alpha, cal_dynamic);
    }
    if (shortlist->parsed()) {
      return run_shortlist(sl_pool, sl_threshold, sl_out);
    }
    if (experiment->parsed() || diversity->parsed()) {
      cfg.methods = parse_methods(exp_methods, exp_bins);
      parse_sweep(exp_sweep, cfg);
      if (diversity->parsed()) {
        if (exp_group_weights.empty()) exp_group_weights = "maj=0.7,min=0.3";
        cfg.groups = build_groups(exp_group_weights, exp_group_noise);
        cfg.sweep_group = exp_sweep_group.empty() ? "min" : exp_sweep_group;
        if (exp_methods == "css") {
          cfg.methods = parse_methods("css-div,css", exp_bins);  // sensible default pair
        }
      }
      return run_experiment(cfg, exp_out, exp_svg, exp_svg_metric);
    }
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const MissingHeader& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
