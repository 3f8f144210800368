#include "kne/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kne/eval.hpp"
#include "kne/graph.hpp"
#include "kne/io.hpp"
#include "kne/trainer.hpp"
#include "kne/walks.hpp"

namespace kne::cli {

namespace {

// Raw flag values shared by every subcommand that trains a model.
struct TrainFlags {
  std::size_t dim = 128;
  std::size_t window = 10;
  std::size_t walks = 80;
  std::size_t length = 10;
  std::size_t negatives = 5;
  double lambda = 1e-2;
  double beta = 0.1;
  double lr = 0.025;
  double lr_min = 1e-4;
  std::string kernel = "sch";
  double sigma = 2.0;
  bool multi = false;
  std::vector<double> sigmas;
  double p = 1.0;
  double q = 1.0;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  bool quiet = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void add_walk_flags(CLI::App* app, TrainFlags& f) {
  app->add_option("--walks", f.walks, "walks per node (N)")->capture_default_str();
  app->add_option("--length", f.length, "walk length (L)")->capture_default_str();
  app->add_option("--p", f.p, "node2vec return parameter")->capture_default_str();
  app->add_option("--q", f.q, "node2vec in-out parameter")->capture_default_str();
  app->add_option("--seed", f.seed, "random seed")->capture_default_str();
  app->add_option("--threads", f.threads, "worker threads (1 = deterministic)")->capture_default_str();
}

void add_train_flags(CLI::App* app, TrainFlags& f) {
  add_walk_flags(app, f);
  app->add_option("--dim", f.dim, "embedding size (d)")->capture_default_str();
  app->add_option("--window", f.window, "window size (gamma)")->capture_default_str();
  app->add_option("--negatives", f.negatives, "negative samples per pair (k)")->capture_default_str();
  app->add_option("--lambda", f.lambda, "embedding regularization")->capture_default_str();
  app->add_option("--beta", f.beta, "kernel coefficient regularization")->capture_default_str();
  app->add_option("--lr", f.lr, "initial learning rate")->capture_default_str();
  app->add_option("--lr-min", f.lr_min, "minimum learning rate")->capture_default_str();
  app->add_option("--kernel", f.kernel, "kernel family")
      ->check(CLI::IsMember({"gauss", "sch"}))
      ->capture_default_str();
  app->add_option("--sigma", f.sigma, "kernel parameter (single kernel)")->capture_default_str();
  app->add_flag("--multi", f.multi, "learn a combination of kernels (requires --sigmas)");
  app->add_option("--sigmas", f.sigmas, "comma-separated kernel parameters, one kernel each")->delimiter(',');
  app->add_flag("--quiet", f.quiet, "no progress counter");
}

TrainConfig to_config(const TrainFlags& f) {
  if (f.multi && f.sigmas.empty()) throw UsageError("--multi needs --sigmas");
  TrainConfig cfg;
  cfg.dim = f.dim;
  cfg.window = f.window;
  cfg.walk_length = f.length;
  cfg.walks_per_node = f.walks;
  cfg.negatives = f.negatives;
  cfg.lambda = f.lambda;
  cfg.beta = f.beta;
  cfg.lr = f.lr;
  cfg.lr_min = f.lr_min;
  cfg.p = f.p;
  cfg.q = f.q;
  cfg.seed = f.seed;
  cfg.threads = f.threads;
  const KernelFamily family = parse_kernel_family(f.kernel);
  if (f.sigmas.empty()) {
    cfg.kernels = KernelBank({KernelSpec{family, f.sigma}});
  } else {
    cfg.kernels = KernelBank::uniform_family(family, f.sigmas);
  }
  cfg.validate();
  return cfg;
}

void echo_config(const TrainConfig& cfg, std::ostream& err) {
  err << "config: dim=" << cfg.dim << " window=" << cfg.window << " walks=" << cfg.walks_per_node
      << " length=" << cfg.walk_length << " negatives=" << cfg.negatives << " lambda=" << cfg.lambda
      << " beta=" << cfg.beta << " lr=" << cfg.lr << " lr_min=" << cfg.lr_min << " p=" << cfg.p << " q=" << cfg.q
      << " kernel=" << kernel_family_name(cfg.kernels[0].family) << " sigmas=";
  for (std::size_t i = 0; i < cfg.kernels.size(); ++i) err << (i ? "," : "") << cfg.kernels[i].sigma;
  err << " threads=" << cfg.threads << " seed=" << cfg.seed << '\n';
}

ProgressFn progress_printer(bool quiet, std::ostream& err) {
  if (quiet) return {};
  return [&err](std::size_t done, std::size_t total) {
    err << "\rpairs " << done << '/' << total << std::flush;
    if (done == total) err << '\n';
  };
}

TrainResult train_and_report(const Graph& g, const TrainConfig& cfg, bool quiet, std::ostream& err) {
  TrainResult r = train(g, cfg, progress_printer(quiet, err));
  err << "trained on " << r.stats.walks << " walks, " << r.stats.pairs << " pairs; mean pair loss "
      << r.stats.mean_pair_loss << "; walks " << std::fixed << std::setprecision(2) << r.stats.walk_seconds
      << "s, training " << r.stats.train_seconds << "s\n";
  err.unsetf(std::ios::floatfield);
  return r;
}

void emit_metrics(const std::vector<MetricRow>& rows, const std::string& csv_path, std::ostream& out) {
  write_metrics_table(rows, out);
  if (csv_path.empty()) {
    out << '\n';
    write_metrics_csv(rows, out);
    return;
  }
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open '" + csv_path + "' for writing");
  write_metrics_csv(rows, csv);
}

std::string ratio_tag(double r) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << r;
  return s.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel node embeddings: walks, training and evaluation"};
  app.require_subcommand(1);

  TrainFlags flags;
  std::string input, output, output_b, walk_dump, csv_path, labels_path, embeddings_path;
  double ratio = 0.5;
  bool full_graph = false;
  std::size_t runs = 50;
  std::vector<double> train_ratios{0.1, 0.5, 0.9};

  auto* walks_cmd = app.add_subcommand("walks", "generate and dump the walk corpus");
  walks_cmd->add_option("--input", input, "edge list")->required()->check(CLI::ExistingFile);
  walks_cmd->add_option("--output", output, "walk dump path")->required();
  add_walk_flags(walks_cmd, flags);

  auto* train_cmd = app.add_subcommand("train", "learn embeddings");
  train_cmd->add_option("--input", input, "edge list")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--output", output, "embedding file (context table A)")->required();
  train_cmd->add_option("--output-b", output_b, "also write the center table B here");
  train_cmd->add_option("--walk-dump", walk_dump, "also write the walk corpus here");
  add_train_flags(train_cmd, flags);

  auto* lp_cmd = app.add_subcommand("eval-lp", "link prediction: split, train on residual, AUC");
  lp_cmd->add_option("--input", input, "edge list")->required()->check(CLI::ExistingFile);
  lp_cmd->add_option("--ratio", ratio, "fraction of edges to hold out")->capture_default_str();
  lp_cmd->add_flag("--full-graph", full_graph, "skip the reduction to the giant component");
  lp_cmd->add_option("--output", output, "write the residual-graph embeddings here");
  lp_cmd->add_option("--csv", csv_path, "metrics CSV path (default: stdout)");
  add_train_flags(lp_cmd, flags);

  auto* nc_cmd = app.add_subcommand("eval-nc", "node classification with one-vs-rest logistic regression");
  auto* nc_input = nc_cmd->add_option("--input", input, "edge list to train on")->check(CLI::ExistingFile);
  auto* nc_emb =
      nc_cmd->add_option("--embeddings", embeddings_path, "precomputed embedding file")->check(CLI::ExistingFile);
  nc_input->excludes(nc_emb);
  nc_cmd->add_option("--labels", labels_path, "node label file")->required()->check(CLI::ExistingFile);
  nc_cmd->add_option("--train-ratios", train_ratios, "comma-separated training fractions")
      ->delimiter(',')
      ->capture_default_str();
  nc_cmd->add_option("--runs", runs, "random splits per ratio")->capture_default_str();
  nc_cmd->add_option("--output", output, "write the trained embeddings here");
  nc_cmd->add_option("--csv", csv_path, "metrics CSV path (default: stdout)");
  add_train_flags(nc_cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help, error;
    const int code = app.exit(e, help, error);
    out << help.str();
    err << error.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (walks_cmd->parsed()) {
      if (flags.walks < 1 || flags.length < 1) throw UsageError("--walks and --length must be >= 1");
      err << "config: walks=" << flags.walks << " length=" << flags.length << " p=" << flags.p << " q=" << flags.q
          << " threads=" << flags.threads << " seed=" << flags.seed << '\n';
      const Graph g = read_edge_list(input);
      const TransitionModel tm(g, flags.p, flags.q);
      const WalkCorpus corpus = generate_walks(
          tm, {.walks_per_node = flags.walks, .length = flags.length, .seed = flags.seed, .threads = flags.threads});
      std::ofstream dump(output);
      if (!dump) throw std::runtime_error("cannot open '" + output + "' for writing");
      write_walks(corpus, g, dump);
      err << "wrote " << corpus.size() << " walks to " << output << '\n';
      return kExitOk;
    }

    const TrainConfig cfg = to_config(flags);
    echo_config(cfg, err);

    if (train_cmd->parsed()) {
      const Graph g = read_edge_list(input);
      err << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
      if (!walk_dump.empty()) {
        const TransitionModel tm(g, cfg.p, cfg.q);
        const WalkCorpus corpus = generate_walks(
            tm, {.walks_per_node = cfg.walks_per_node, .length = cfg.walk_length, .seed = cfg.seed,
                 .threads = cfg.threads});
        std::ofstream dump(walk_dump);
        if (!dump) throw std::runtime_error("cannot open '" + walk_dump + "' for writing");
        write_walks(corpus, g, dump);
      }
      const TrainResult r = train_and_report(g, cfg, flags.quiet, err);
      write_embeddings(r.model, g.labels(), output, EmbeddingTable::kContext);
      if (!output_b.empty()) write_embeddings(r.model, g.labels(), output_b, EmbeddingTable::kCenter);
      if (cfg.kernels.size() > 1) {
        err << "kernel coefficients:";
        for (float c : r.model.c()) err << ' ' << c;
        err << '\n';
      }
      return kExitOk;
    }

    if (lp_cmd->parsed()) {
      if (!(ratio > 0.0 && ratio < 1.0)) throw UsageError("--ratio must be in (0, 1)");
      const Graph full = read_edge_list(input);
      const Graph g = full_graph ? full : giant_component(full).graph;
      err << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges"
          << (full_graph ? "" : " (giant component)") << '\n';
      Rng split_rng = make_rng(cfg.seed, {0x53504c4954ULL});
      const EvalSplit split = split_link_prediction(g, ratio, split_rng);
      if (!split.complete()) {
        err << "warning: removed only " << split.pos_edges.size() << " of " << split.target
            << " edges without disconnecting the graph\n";
      }
      const TrainResult r = train_and_report(split.residual, cfg, flags.quiet, err);
      if (!output.empty()) write_embeddings(r.model, g.labels(), output);
      Rng eval_rng = make_rng(cfg.seed, {0x4c50ULL});
      const LinkPredictionResult lp = evaluate_link_prediction(r.model, g, split, eval_rng);
      std::vector<MetricRow> rows{{"auc", lp.auc, 1, 0.0},
                                  {"test_pairs", static_cast<double>(lp.test_examples), 1, 0.0},
                                  {"train_pairs", static_cast<double>(lp.train_examples), 1, 0.0}};
      emit_metrics(rows, csv_path, out);
      return kExitOk;
    }

    if (nc_cmd->parsed()) {
      if (input.empty() == embeddings_path.empty()) throw UsageError("eval-nc needs exactly one of --input or --embeddings");
      if (runs < 1) throw UsageError("--runs must be >= 1");
      for (double r : train_ratios) {
        if (!(r > 0.0 && r < 1.0)) throw UsageError("training ratios must be in (0, 1)");
      }
      EmbeddingModel model;
      std::vector<std::string> names;
      if (!embeddings_path.empty()) {
        LoadedEmbeddings loaded = read_embeddings(embeddings_path);
        model = std::move(loaded.model);
        names = std::move(loaded.labels);
      } else {
        const Graph g = read_edge_list(input);
        err << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
        TrainResult r = train_and_report(g, cfg, flags.quiet, err);
        if (!output.empty()) write_embeddings(r.model, g.labels(), output);
        model = std::move(r.model);
        names = g.labels();
      }
      const LabelSet labels = read_labels(labels_path, names);
      err << "labels: " << labels.labeled_count() << " labeled nodes, " << labels.label_count() << " classes\n";
      const FeatureMatrix features = embedding_features(model);
      std::vector<MetricRow> rows;
      for (double r : train_ratios) {
        const NodeClassificationResult nc = node_classification(features, labels, r, runs, cfg.seed, cfg.threads);
        rows.push_back({"micro_f1@" + ratio_tag(r), nc.micro_mean, nc.runs, nc.micro_std});
        rows.push_back({"macro_f1@" + ratio_tag(r), nc.macro_mean, nc.runs, nc.macro_std});
        if (nc.runs_missing_class) {
          err << "note: " << nc.runs_missing_class << " of " << nc.runs << " runs at ratio " << ratio_tag(r)
              << " had a class missing from the training split\n";
        }
      }
      emit_metrics(rows, csv_path, out);
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace kne::cli
