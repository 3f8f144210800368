#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kne/graph.hpp"
#include "kne/model.hpp"
#include "kne/random.hpp"

namespace kne {

// ---------------------------------------------------------------------------
// Link prediction split
// ---------------------------------------------------------------------------

struct EvalSplit {
  Graph residual;               // same node ids as the input graph
  std::vector<Edge> pos_edges;  // removed edges, u < v
  std::vector<Edge> neg_edges;  // node pairs absent from the input graph, u < v
  std::size_t target = 0;       // floor(ratio * |E|)
  bool complete() const noexcept { return pos_edges.size() == target; }
};

// Removes edges in random order, keeping a removal only if its endpoints stay
// connected in the residual graph, until floor(ratio * |E|) edges are gone or
// the candidates run out. Then samples as many distinct non-edges as edges
// were removed, or every non-edge when there are fewer. The input must be
// connected.
EvalSplit split_link_prediction(const Graph& g, double ratio, Rng& rng);

// Distinct uniformly random node pairs u < v that are not edges of g and not
// in `exclude`. Throws if fewer than `count` such pairs exist.
std::vector<Edge> sample_non_edges(const Graph& g, std::size_t count, std::span<const Edge> exclude,
                                   Rng& rng);

// |A_u - A_v|^2 coordinate-wise.
std::vector<double> edge_features(const EmbeddingModel& model, NodeId u, NodeId v);

// ---------------------------------------------------------------------------
// L2-regularized binary logistic regression
// ---------------------------------------------------------------------------

class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<double> row(std::size_t i) { return std::span<double>(data_).subspan(i * cols_, cols_); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  void append_row(std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Per-column z-scoring fitted on one matrix and applied to others. Constant
// columns are centered only.
class Standardizer {
 public:
  static Standardizer fit(const FeatureMatrix& x);
  void apply(FeatureMatrix& x) const;

 private:
  std::vector<double> mean_, scale_;
};

struct LogRegOptions {
  double l2 = -1.0;  // < 0 selects 1 / n_samples
  std::size_t max_iters = 1000;
  double tol = 1e-6;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  double decision(std::span<const double> x) const;
  double probability(std::span<const double> x) const;
};

struct LogRegFit {
  LogisticModel model;
  std::vector<double> loss_trace;  // objective after every accepted step
  std::size_t iterations = 0;
  bool converged = false;
  bool constant = false;  // single-class input
};

// Minimizes mean log-loss + l2/2 |w|^2 (intercept unpenalized) by full-batch
// gradient descent with Armijo backtracking. Labels are 0/1.
LogRegFit train_logreg(const FeatureMatrix& x, std::span<const int> y, const LogRegOptions& opts = {});

// Objective minimized by train_logreg, exposed for tests.
double logreg_objective(const FeatureMatrix& x, std::span<const int> y, const LogisticModel& m, double l2);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

// Mann-Whitney statistic, ties count 1/2. Throws unless both classes occur.
double auc(std::span<const double> scores, std::span<const int> labels);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

// Single-label predictions in [0, label_count). Macro averages over all
// label_count classes; a class with no support and no predictions scores 0.
F1Scores micro_macro_f1(std::span<const int> predicted, std::span<const int> truth, std::size_t label_count);

// ---------------------------------------------------------------------------
// Protocols
// ---------------------------------------------------------------------------

struct LinkPredictionResult {
  double auc = 0.0;
  std::size_t train_examples = 0;
  std::size_t test_examples = 0;
};

// Classifier trained on residual edges (positive) against an equal number of
// fresh non-edges of the original graph, scored on the split's held-out
// positive and negative pairs.
LinkPredictionResult evaluate_link_prediction(const EmbeddingModel& model, const Graph& original,
                                              const EvalSplit& split, Rng& rng, const LogRegOptions& opts = {});

struct LabelSet {
  std::vector<int> label_of;  // per row, -1 when unlabeled
  std::vector<std::string> names;
  std::size_t label_count() const noexcept { return names.size(); }
  std::size_t labeled_count() const;
};

// "node-label label-id" per line. `node_names` maps row index to the node
// label used in the file. Unknown nodes and conflicting labels are errors.
LabelSet parse_labels(std::istream& in, std::span<const std::string> node_names);
LabelSet read_labels(const std::string& path, std::span<const std::string> node_names);

struct NodeClassificationResult {
  double micro_mean = 0.0, micro_std = 0.0;
  double macro_mean = 0.0, macro_std = 0.0;
  std::size_t runs = 0;
  std::size_t runs_missing_class = 0;  // runs whose training split lacked a class
};

// Repeated unstratified random splits; one-vs-rest logistic regression on
// the given feature rows, argmax prediction.
NodeClassificationResult node_classification(const FeatureMatrix& features, const LabelSet& labels,
                                             double train_ratio, std::size_t runs, std::uint64_t seed,
                                             unsigned threads = 1, const LogRegOptions& opts = {});

FeatureMatrix embedding_features(const EmbeddingModel& model);

struct MetricRow {
  std::string metric;
  double value = 0.0;
  std::size_t runs = 1;
  double std = 0.0;
};

void write_metrics_csv(std::span<const MetricRow> rows, std::ostream& out);
void write_metrics_table(std::span<const MetricRow> rows, std::ostream& out);

}  // namespace kne
