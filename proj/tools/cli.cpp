#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mist/eval.hpp"
#include "mist/trainer.hpp"

#ifndef MIST_VERSION
#define MIST_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace mist::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

fs::path resolve_out(const std::string& path) {
  fs::path p(path);
  const char* root = std::getenv("MIST_OUTPUT_ROOT");
  if (p.is_relative() && root != nullptr && *root != '\0') p = fs::path(root) / p;
  return p;
}

void prepare_run_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir))) {
    if (!force) throw UsageError(dir.string() + " already exists; pass --force to overwrite it");
    fs::remove_all(dir);
  }
  fs::create_directories(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

MistConfig resolve_config(const std::string& config_path, const std::vector<std::string>& sets) {
  MistConfig cfg = config_path.empty() ? MistConfig{} : MistConfig::load(config_path);
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

Dataset load_labeled(const std::string& path, const char* command) {
  Dataset data = load_csv(path);
  if (!data.labels) throw UsageError(std::string(command) + " needs ground-truth labels in " + path);
  return data;
}

void write_metrics(const fs::path& path, const TrainReport& report) {
  std::ofstream out(path);
  out << "epoch,step,r_vat,h_y,h_y_given_x,l_ps,l_ng,i_nce,i_nce_prime,total,acc\n";
  for (std::size_t s = 0; s < report.steps.size(); ++s) {
    const StepRecord& r = report.steps[s];
    const LossBreakdown& p = r.parts;
    out << r.epoch << ',' << r.step << ',' << num(p.r_vat) << ',' << num(p.h_y) << ',' << num(p.h_y_given_x) << ','
        << num(p.l_ps) << ',' << num(p.l_ng) << ',' << num(p.i_nce_hat) << ',' << num(p.i_nce_hat_prime) << ','
        << num(p.total) << ',';
    // Accuracy is measured once per epoch, after its last step.
    const bool last = s + 1 == report.steps.size() || report.steps[s + 1].epoch != r.epoch;
    const auto& acc = report.epochs[static_cast<std::size_t>(r.epoch - 1)].acc;
    if (last && acc) out << num(*acc);
    out << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_labels(const fs::path& path, const Labels& labels) {
  std::ofstream out(path);
  out << "index,pred_label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Labels read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,", 0) != 0) {
    throw std::runtime_error(path + ": expected header 'index,pred_label'");
  }
  Labels out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    long long index = -1;
    int label = -1;
    char comma = 0;
    if (!(row >> index >> comma >> label) || comma != ',' || label < 0) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed label row");
    }
    if (index != static_cast<long long>(out.size())) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": indices must run 0, 1, 2, ...");
    }
    out.push_back(label);
  }
  return out;
}

std::string join(const std::vector<double>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + num(v[i]);
  return s;
}

nlohmann::json manifest(const std::string& command, const std::vector<std::string>& argv, const MistConfig& cfg,
                        const std::string& data_path, const Dataset& data, const std::vector<std::uint64_t>& seeds,
                        const fs::path& out_dir) {
  nlohmann::json m;
  m["command"] = command;
  m["argv"] = argv;
  m["tool_version"] = MIST_VERSION;
  m["config"] = cfg.to_text();
  m["config_hash"] = hex(cfg.hash());
  m["data_path"] = fs::absolute(data_path).string();
  m["dataset_hash"] = hex(dataset_hash(data));
  m["seeds"] = seeds;
  m["output_dir"] = fs::absolute(out_dir).string();
  return m;
}

void write_manifest(const fs::path& dir, const nlohmann::json& m) { write_text(dir / "manifest.json", m.dump(2) + "\n"); }

ProgressFn epoch_printer(std::ostream& err, std::uint64_t seed, int epochs, bool quiet) {
  if (quiet) return {};
  return [&err, seed, epochs](const EpochRecord& e) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "seed %llu epoch %d/%d total %.6f", static_cast<unsigned long long>(seed), e.epoch,
                  epochs, e.mean.total);
    err << buf;
    if (e.acc) err << " acc " << std::fixed << std::setprecision(2) << *e.acc << std::defaultfloat;
    err << '\n';
  };
}

void save_run(const fs::path& dir, const TrainReport& report) {
  fs::create_directories(dir);
  write_metrics(dir / "metrics.csv", report);
  write_labels(dir / "labels.csv", report.predicted);
}

struct TrainArgs {
  std::string data;
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::uint64_t> seeds{0};
  std::string out;
  bool force = false;
  bool quiet = false;
};

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--data", a.data, "CSV with header f0,...,f{d-1}[,label]")->required();
  cmd->add_option("--config", a.config, "key = value config file");
  cmd->add_option("--set", a.sets, "override one config key (key=value), repeatable");
  cmd->add_option("--seeds", a.seeds, "comma-separated seeds")->delimiter(',');
  cmd->add_option("--out", a.out, "run directory")->required();
  cmd->add_flag("--force", a.force, "replace an existing run directory");
  cmd->add_flag("--quiet", a.quiet, "no per-epoch progress");
}

int cmd_gen(const std::string& name, Index n, std::optional<double> noise, double factor, std::uint64_t seed,
            const std::string& out_path, std::ostream& out) {
  if (n < 2) throw UsageError("--n must be at least 2");
  Dataset data = name == "two-moons" ? make_two_moons(n, noise.value_or(0.05), seed)
                                     : make_two_rings(n, noise.value_or(0.01), factor, seed);
  const fs::path path = resolve_out(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_csv(data, path);
  std::vector<int> counts(static_cast<std::size_t>(data.num_classes()), 0);
  for (int y : *data.labels) ++counts[static_cast<std::size_t>(y)];
  out << "wrote " << path.string() << ": n=" << data.size() << " d=" << data.dim() << " C=" << data.num_classes()
      << " balance=";
  for (std::size_t c = 0; c < counts.size(); ++c) out << (c ? "/" : "") << counts[c];
  out << '\n';
  return kExitOk;
}

int cmd_train(const TrainArgs& a, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  const MistConfig base = resolve_config(a.config, a.sets);
  if (a.seeds.empty()) throw UsageError("--seeds needs at least one seed");
  const Dataset data = load_csv(a.data);
  const fs::path dir = resolve_out(a.out);
  const TrainingInputs inputs = prepare_inputs(data, base);
  prepare_run_dir(dir, a.force);
  write_manifest(dir, manifest("train", argv, base, a.data, data, a.seeds, dir));
  write_text(dir / "config.txt", base.to_text());

  std::vector<double> accs;
  std::ostringstream summary;
  summary << "seed,acc\n";
  for (std::uint64_t seed : a.seeds) {
    MistConfig cfg = base;
    cfg.seed = seed;
    const TrainResult r = train(data, cfg, inputs, epoch_printer(err, seed, cfg.epochs, a.quiet));
    const fs::path run = dir / ("seed_" + std::to_string(seed));
    save_run(run, r.report);
    save_checkpoint(run / "model.ckpt", r.state, r.adam, cfg.hash());
    summary << seed << ',' << (r.report.final_acc ? num(*r.report.final_acc) : "") << '\n';
    if (r.report.final_acc) accs.push_back(*r.report.final_acc);
    out << "seed " << seed << ": " << std::fixed << std::setprecision(2);
    if (r.report.final_acc) out << "ACC " << *r.report.final_acc;
    else out << "done";
    out << std::defaultfloat << " (" << std::setprecision(1) << std::fixed << r.report.wall_seconds << " s)"
        << std::defaultfloat << std::setprecision(6) << '\n';
  }
  write_text(dir / "summary.csv", summary.str());
  if (!accs.empty()) {
    out << "ACC mean(std) over " << accs.size() << " seed(s): " << format_summary(summarize(accs)) << '\n';
  }
  return kExitOk;
}

int cmd_eval(const std::string& data_path, const std::string& labels_path, bool use_kmeans, int clusters,
             std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  const Dataset data = load_labeled(data_path, "eval");
  const int c = clusters > 0 ? clusters : data.num_classes();
  Labels predicted;
  if (use_kmeans) {
    predicted = kmeans(data, c, seed);
    if (!out_path.empty()) write_labels(resolve_out(out_path), predicted);
  } else {
    predicted = read_labels(labels_path);
    if (predicted.size() != data.labels->size()) {
      throw std::runtime_error("labels file has " + std::to_string(predicted.size()) + " rows, data has " +
                               std::to_string(data.labels->size()));
    }
  }
  int width = c;
  for (int y : predicted) width = std::max(width, y + 1);
  char buf[64];
  std::snprintf(buf, sizeof buf, "ACC %.2f\n", clustering_accuracy(*data.labels, predicted, width));
  out << buf;
  return kExitOk;
}

int cmd_ablate(const TrainArgs& a, const std::vector<std::string>& combos, const std::string& profile_name,
               const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  const MistConfig base = resolve_config(a.config, a.sets);
  if (combos.empty()) throw UsageError("--combo needs at least one term set");
  std::vector<TermSet> sets;
  for (const std::string& c : combos) {
    if (c == "all") {
      for (const char* s : {"D", "BC", "BD", "AD", "ABC", "BCD", "ABCD"}) sets.push_back(TermSet::parse(s));
    } else {
      sets.push_back(TermSet::parse(c));
    }
  }
  const AblationProfile profile = profile_name == "real" ? AblationProfile::RealWorld : AblationProfile::Synthetic;
  const Dataset data = load_labeled(a.data, "ablate");
  const fs::path dir = resolve_out(a.out);
  prepare_run_dir(dir, a.force);
  nlohmann::json m = manifest("ablate", argv, base, a.data, data, a.seeds, dir);
  m["profile"] = profile_name;
  for (const TermSet& t : sets) m["combos"].push_back(t.str());
  write_manifest(dir, m);

  std::ostringstream table;
  table << "combo,mean,std,summary,accs\n";
  out << "combo  ACC mean(std)\n";
  for (const TermSet& t : sets) {
    const MistConfig cfg0 = ablation_config(base, t, profile);
    const TrainingInputs inputs = prepare_inputs(data, cfg0);
    std::vector<double> accs;
    for (std::uint64_t seed : a.seeds) {
      MistConfig cfg = cfg0;
      cfg.seed = seed;
      const TrainReport r = train(data, cfg, inputs, epoch_printer(err, seed, cfg.epochs, a.quiet)).report;
      save_run(dir / ("combo_" + t.str()) / ("seed_" + std::to_string(seed)), r);
      accs.push_back(*r.final_acc);
    }
    const Summary s = summarize(accs);
    table << t.str() << ',' << num(s.mean) << ',' << num(s.std) << ',' << format_summary(s) << ','
          << join(accs, ";") << '\n';
    out << std::left << std::setw(7) << t.str() << format_summary(s) << '\n';
  }
  write_text(dir / "ablation.csv", table.str());
  return kExitOk;
}

int cmd_sweep(const TrainArgs& a, const std::string& axis_name, const std::vector<double>& values,
              const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  const MistConfig base = resolve_config(a.config, a.sets);
  if (values.empty()) throw UsageError("--values needs at least one value");
  if (a.seeds.empty()) throw UsageError("--seeds needs at least one seed");
  const SweepAxis axis = parse_sweep_axis(axis_name);
  for (double v : values) (void)sweep_config(base, axis, v);
  const Dataset data = load_labeled(a.data, "sweep");
  const fs::path dir = resolve_out(a.out);
  prepare_run_dir(dir, a.force);
  nlohmann::json m = manifest("sweep", argv, base, a.data, data, a.seeds, dir);
  m["axis"] = axis_name;
  m["values"] = values;
  write_manifest(dir, m);

  std::ostringstream table;
  table << "axis,value,mean,std,summary,accs\n";
  out << axis_name << "  ACC mean(std)\n";
  std::optional<TrainingInputs> shared;
  for (double v : values) {
    const MistConfig cfg0 = sweep_config(base, axis, v);
    std::optional<TrainingInputs> local;
    if (axis == SweepAxis::K0) local = prepare_inputs(data, cfg0);
    else if (!shared) shared = prepare_inputs(data, cfg0);
    const TrainingInputs& inputs = local ? *local : *shared;
    std::vector<double> accs;
    for (std::uint64_t seed : a.seeds) {
      MistConfig cfg = cfg0;
      cfg.seed = seed;
      const TrainReport r = train(data, cfg, inputs, epoch_printer(err, seed, cfg.epochs, a.quiet)).report;
      save_run(dir / (axis_name + "_" + num(v)) / ("seed_" + std::to_string(seed)), r);
      accs.push_back(*r.final_acc);
    }
    const Summary s = summarize(accs);
    table << axis_name << ',' << num(v) << ',' << num(s.mean) << ',' << num(s.std) << ',' << format_summary(s) << ','
          << join(accs, ";") << '\n';
    out << std::left << std::setw(static_cast<int>(axis_name.size()) + 2) << num(v) << format_summary(s) << '\n';
  }
  write_text(dir / "sweep.csv", table.str());
  return kExitOk;
}

int cmd_plot(const std::string& data_path, const std::string& labels_path, const std::string& out_path,
             const std::string& title, std::ostream& out) {
  const Dataset data = load_csv(data_path);
  if (data.dim() != 2) {
    throw UsageError("plot draws 2-D data only (got d=" + std::to_string(data.dim()) +
                     "); it is meant for the synthetic datasets");
  }
  Labels labels;
  if (!labels_path.empty()) {
    labels = read_labels(labels_path);
    if (labels.size() != static_cast<std::size_t>(data.size())) {
      throw std::runtime_error("labels file has " + std::to_string(labels.size()) + " rows, data has " +
                               std::to_string(data.size()));
    }
  } else if (data.labels) {
    labels = *data.labels;
  } else {
    labels.assign(static_cast<std::size_t>(data.size()), 0);
  }
  std::vector<double> xs(static_cast<std::size_t>(data.size())), ys(xs.size());
  for (Index i = 0; i < data.size(); ++i) {
    xs[static_cast<std::size_t>(i)] = data.features(i, 0);
    ys[static_cast<std::size_t>(i)] = data.features(i, 1);
  }
  const fs::path path = resolve_out(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, scatter_svg(xs, ys, labels, title.empty() ? fs::path(data_path).filename().string() : title));
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (part.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("--values: '" + part + "' is not a number");
    }
  }
  return values;
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string scatter_svg(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<int>& labels,
                        const std::string& title) {
  static const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  constexpr double kSize = 640.0, kMargin = 40.0;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!xs.empty()) {
    x0 = *std::min_element(xs.begin(), xs.end());
    x1 = *std::max_element(xs.begin(), xs.end());
    y0 = *std::min_element(ys.begin(), ys.end());
    y1 = *std::max_element(ys.begin(), ys.end());
  }
  // Equal scale on both axes so rings stay round.
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double scale = (kSize - 2.0 * kMargin) / span;
  auto px = [&](double x) { return kSize / 2.0 + (x - cx) * scale; };
  auto py = [&](double y) { return kSize / 2.0 - (y - cy) * scale; };

  std::map<int, std::size_t> counts;
  for (int y : labels) ++counts[y];

  std::ostringstream s;
  char buf[160];
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
  s << "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
  s << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << xml_escape(title) << "</text>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const char* color = kPalette[static_cast<std::size_t>(labels[i]) % 10];
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.6\" fill=\"%s\" fill-opacity=\"0.7\"/>\n",
                  px(xs[i]), py(ys[i]), color);
    s << buf;
  }
  double ly = 44.0;
  for (const auto& [label, count] : counts) {
    std::snprintf(buf, sizeof buf, "<rect x=\"520\" y=\"%.0f\" width=\"12\" height=\"12\" fill=\"%s\"/>\n", ly,
                  kPalette[static_cast<std::size_t>(label) % 10]);
    s << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"538\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"12\">label %d (%zu)</text>\n",
                  ly + 11.0, label, count);
    s << buf;
    ly += 18.0;
  }
  s << "</svg>\n";
  return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MIST deep clustering"};
  app.name("mist");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(MIST_VERSION));

  std::string gen_name, gen_out;
  Index gen_n = 5000;
  std::optional<double> gen_noise;
  double gen_factor = 0.35;
  std::uint64_t gen_seed = 0;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset as CSV");
  gen->add_option("name", gen_name, "two-moons or two-rings")->required()->check(CLI::IsMember({"two-moons", "two-rings"}));
  gen->add_option("--n", gen_n, "number of points");
  gen->add_option("--noise", gen_noise, "Gaussian noise std (default 0.05 moons, 0.01 rings)");
  gen->add_option("--factor", gen_factor, "inner/outer radius ratio for two-rings");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output CSV")->required();

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train MIST for one or more seeds");
  add_train_options(train_cmd, train_args);

  std::string eval_data, eval_labels, eval_out;
  bool eval_kmeans = false;
  int eval_clusters = 0;
  std::uint64_t eval_seed = 0;
  CLI::App* eval = app.add_subcommand("eval", "clustering accuracy of a labels file or of K-means");
  eval->add_option("--data", eval_data)->required();
  auto* labels_opt = eval->add_option("--labels", eval_labels, "index,pred_label CSV");
  auto* kmeans_opt = eval->add_flag("--kmeans", eval_kmeans, "run the K-means baseline");
  labels_opt->excludes(kmeans_opt);
  eval->add_option("--clusters", eval_clusters, "number of clusters (default: from labels)");
  eval->add_option("--seed", eval_seed, "K-means seed");
  eval->add_option("--out", eval_out, "write K-means labels here");

  TrainArgs ablate_args;
  std::vector<std::string> combos;
  std::string profile = "synthetic";
  CLI::App* ablate = app.add_subcommand("ablate", "train term subsets and tabulate mean(std) ACC");
  add_train_options(ablate, ablate_args);
  ablate->add_option("--combo", combos, "term set such as BC or ABCD, or 'all'; repeatable")->required();
  ablate->add_option("--profile", profile, "weight column")->check(CLI::IsMember({"synthetic", "real"}));

  TrainArgs sweep_args;
  std::string axis;
  std::string values_text;
  CLI::App* sweep = app.add_subcommand("sweep", "vary one hyper-parameter and tabulate mean(std) ACC");
  add_train_options(sweep, sweep_args);
  sweep->add_option("--axis", axis, "k0, alpha or gamma")->required()->check(CLI::IsMember({"k0", "alpha", "gamma"}));
  sweep->add_option("--values", values_text, "comma-separated values, e.g. 5,10,15,50")->required();

  std::string plot_data, plot_labels, plot_out, plot_title;
  CLI::App* plot = app.add_subcommand("plot", "SVG scatter of 2-D data colored by label");
  plot->add_option("--data", plot_data)->required();
  plot->add_option("--labels", plot_labels, "index,pred_label CSV (default: labels in the data file)");
  plot->add_option("--out", plot_out, "output SVG")->required();
  plot->add_option("--title", plot_title);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_name, gen_n, gen_noise, gen_factor, gen_seed, gen_out, out);
    if (*train_cmd) return cmd_train(train_args, args, out, err);
    if (*eval) {
      if (!eval_kmeans && eval_labels.empty()) throw UsageError("eval needs --labels or --kmeans");
      return cmd_eval(eval_data, eval_labels, eval_kmeans, eval_clusters, eval_seed, eval_out, out);
    }
    if (*ablate) return cmd_ablate(ablate_args, combos, profile, args, out, err);
    if (*sweep) return cmd_sweep(sweep_args, axis, parse_values(values_text), args, out, err);
    if (*plot) return cmd_plot(plot_data, plot_labels, plot_out, plot_title, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace mist::cli
