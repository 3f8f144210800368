#include "kne/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace kne {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Mutable adjacency used while peeling edges off a graph.
class ResidualGraph {
 public:
  explicit ResidualGraph(const Graph& g) : adj_(g.node_count()), stamp_(g.node_count(), 0) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
      auto nbrs = g.neighbors(v);
      adj_[v].assign(nbrs.begin(), nbrs.end());
    }
  }

  void remove(NodeId u, NodeId v) {
    erase(adj_[u], v);
    erase(adj_[v], u);
  }
  void add(NodeId u, NodeId v) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }

  // BFS from `from` that stops as soon as `to` is reached.
  bool reachable(NodeId from, NodeId to) {
    ++epoch_;
    queue_.assign(1, from);
    stamp_[from] = epoch_;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      for (NodeId w : adj_[queue_[head]]) {
        if (w == to) return true;
        if (stamp_[w] != epoch_) {
          stamp_[w] = epoch_;
          queue_.push_back(w);
        }
      }
    }
    return false;
  }

 private:
  static void erase(std::vector<NodeId>& list, NodeId x) {
    auto it = std::find(list.begin(), list.end(), x);
    *it = list.back();
    list.pop_back();
  }

  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> queue_;
};

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

}  // namespace

std::vector<Edge> sample_non_edges(const Graph& g, std::size_t count, std::span<const Edge> exclude, Rng& rng) {
  const std::uint64_t n = g.node_count();
  std::unordered_set<std::uint64_t> taken;
  for (const Edge& e : exclude) taken.insert(pair_key(e.u, e.v));
  const std::uint64_t all_pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  std::size_t excluded_non_edges = 0;
  for (std::uint64_t key : taken) {
    if (!g.has_edge(static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu))) ++excluded_non_edges;
  }
  if (all_pairs < g.edge_count() + excluded_non_edges + count) {
    throw std::invalid_argument("graph has too few non-edges to sample " + std::to_string(count));
  }
  std::vector<Edge> out;
  out.reserve(count);
  if (count == 0) return out;
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  while (out.size() < count) {
    NodeId u = pick(rng), v = pick(rng);
    if (u == v || g.has_edge(u, v)) continue;
    if (!taken.insert(pair_key(u, v)).second) continue;
    out.push_back({std::min(u, v), std::max(u, v)});
  }
  return out;
}

EvalSplit split_link_prediction(const Graph& g, double ratio, Rng& rng) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("removal ratio must be in [0, 1]");
  if (!is_connected(g)) throw std::invalid_argument("link prediction split needs a connected graph");
  std::vector<Edge> candidates = g.edges();
  EvalSplit split;
  split.target = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(candidates.size())));
  std::shuffle(candidates.begin(), candidates.end(), rng);

  ResidualGraph residual(g);
  std::unordered_set<std::uint64_t> removed;
  for (const Edge& e : candidates) {
    if (split.pos_edges.size() == split.target) break;
    residual.remove(e.u, e.v);
    if (residual.reachable(e.u, e.v)) {
      split.pos_edges.push_back(e);
      removed.insert(pair_key(e.u, e.v));
    } else {
      residual.add(e.u, e.v);
    }
  }

  std::vector<Edge> kept;
  kept.reserve(candidates.size() - split.pos_edges.size());
  for (const Edge& e : g.edges()) {
    if (!removed.contains(pair_key(e.u, e.v))) kept.push_back(e);
  }
  split.residual = Graph::from_edges(g.node_count(), std::move(kept), g.labels());
  const std::uint64_t n = g.node_count();
  const std::uint64_t non_edges = n * (n - 1) / 2 - g.edge_count();
  split.neg_edges = sample_non_edges(g, std::min<std::uint64_t>(split.pos_edges.size(), non_edges), {}, rng);
  return split;
}

std::vector<double> edge_features(const EmbeddingModel& model, NodeId u, NodeId v) {
  auto au = model.a(u);
  auto av = model.a(v);
  std::vector<double> out(model.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double diff = static_cast<double>(av[i]) - static_cast<double>(au[i]);
    out[i] = diff * diff;
  }
  return out;
}

void FeatureMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw std::invalid_argument("feature row width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  Standardizer s;
  const std::size_t n = x.rows(), d = x.cols();
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] += r[j];
  }
  for (double& m : s.mean_) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) var[j] += (r[j] - s.mean_[j]) * (r[j] - s.mean_[j]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    s.scale_[j] = sd > 1e-300 ? 1.0 / sd : 1.0;
  }
  return s;
}

void Standardizer::apply(FeatureMatrix& x) const {
  if (x.cols() != mean_.size()) throw std::invalid_argument("standardizer width mismatch");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = (r[j] - mean_[j]) * scale_[j];
  }
}

double LogisticModel::decision(std::span<const double> x) const {
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
  return z;
}

double LogisticModel::probability(std::span<const double> x) const { return sigmoid(decision(x)); }

double logreg_objective(const FeatureMatrix& x, std::span<const int> y, const LogisticModel& m, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double z = m.decision(x.row(i));
    loss += log1p_exp_neg(y[i] ? z : -z);
  }
  loss /= static_cast<double>(std::max<std::size_t>(1, x.rows()));
  double norm = 0.0;
  for (double w : m.weights) norm += w * w;
  return loss + 0.5 * l2 * norm;
}

LogRegFit train_logreg(const FeatureMatrix& x, std::span<const int> y, const LogRegOptions& opts) {
  const std::size_t n = x.rows(), d = x.cols();
  if (y.size() != n) throw std::invalid_argument("label count differs from feature rows");
  if (n == 0) throw std::invalid_argument("logistic regression needs at least one sample");
  LogRegFit fit;
  fit.model.weights.assign(d, 0.0);

  std::size_t positives = 0;
  for (int label : y) {
    if (label != 0 && label != 1) throw std::invalid_argument("logistic regression labels must be 0 or 1");
    positives += static_cast<std::size_t>(label);
  }
  if (positives == 0 || positives == n) {
    constexpr double kClamp = 1e-12;
    const double prior = std::clamp(static_cast<double>(positives) / static_cast<double>(n), kClamp, 1.0 - kClamp);
    fit.model.bias = std::log(prior / (1.0 - prior));
    fit.constant = true;
    fit.converged = true;
    return fit;
  }

  const double l2 = opts.l2 < 0.0 ? 1.0 / static_cast<double>(n) : opts.l2;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> grad_w(d);
  double grad_b = 0.0;
  std::vector<double> z(n);

  auto gradient = [&](const LogisticModel& m) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto r = x.row(i);
      const double residual = (sigmoid(m.decision(r)) - y[i]) * inv_n;
      for (std::size_t j = 0; j < d; ++j) grad_w[j] += residual * r[j];
      grad_b += residual;
    }
    for (std::size_t j = 0; j < d; ++j) grad_w[j] += l2 * m.weights[j];
  };

  double loss = logreg_objective(x, y, fit.model, l2);
  double step = 1.0;
  LogisticModel trial;
  for (fit.iterations = 0; fit.iterations < opts.max_iters; ++fit.iterations) {
    gradient(fit.model);
    double gnorm2 = grad_b * grad_b;
    for (double g : grad_w) gnorm2 += g * g;
    if (std::sqrt(gnorm2) < opts.tol) {
      fit.converged = true;
      break;
    }
    // Armijo backtracking; the step is allowed to grow again afterwards.
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      trial.weights.resize(d);
      for (std::size_t j = 0; j < d; ++j) trial.weights[j] = fit.model.weights[j] - step * grad_w[j];
      trial.bias = fit.model.bias - step * grad_b;
      const double trial_loss = logreg_objective(x, y, trial, l2);
      if (trial_loss <= loss - 0.5 * step * gnorm2) {
        fit.model = trial;
        loss = trial_loss;
        fit.loss_trace.push_back(loss);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      fit.converged = true;
      break;
    }
    step *= 2.0;
  }
  return fit;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] != 0) {
        positive_rank_sum += mean_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw std::invalid_argument("AUC needs both positive and negative labels");
  const double p = static_cast<double>(positives), q = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

F1Scores micro_macro_f1(std::span<const int> predicted, std::span<const int> truth, std::size_t label_count) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction and truth differ in length");
  std::vector<std::size_t> tp(label_count, 0), fp(label_count, 0), fn(label_count, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto p = static_cast<std::size_t>(predicted[i]);
    const auto t = static_cast<std::size_t>(truth[i]);
    if (p >= label_count || t >= label_count) throw std::out_of_range("label id out of range");
    if (p == t) {
      ++tp[t];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  auto f1 = [](double tp_, double fp_, double fn_) {
    const double denom = 2.0 * tp_ + fp_ + fn_;
    return denom > 0.0 ? 2.0 * tp_ / denom : 0.0;
  };
  F1Scores out;
  double sum_tp = 0, sum_fp = 0, sum_fn = 0, macro = 0;
  for (std::size_t c = 0; c < label_count; ++c) {
    sum_tp += static_cast<double>(tp[c]);
    sum_fp += static_cast<double>(fp[c]);
    sum_fn += static_cast<double>(fn[c]);
    macro += f1(static_cast<double>(tp[c]), static_cast<double>(fp[c]), static_cast<double>(fn[c]));
  }
  out.micro = f1(sum_tp, sum_fp, sum_fn);
  out.macro = label_count ? macro / static_cast<double>(label_count) : 0.0;
  return out;
}

LinkPredictionResult evaluate_link_prediction(const EmbeddingModel& model, const Graph& original,
                                              const EvalSplit& split, Rng& rng, const LogRegOptions& opts) {
  const std::vector<Edge> train_pos = split.residual.edges();
  std::vector<Edge> exclude = split.neg_edges;
  const std::vector<Edge> train_neg = sample_non_edges(original, train_pos.size(), exclude, rng);

  FeatureMatrix train_x;
  std::vector<int> train_y;
  for (const Edge& e : train_pos) {
    train_x.append_row(edge_features(model, e.u, e.v));
    train_y.push_back(1);
  }
  for (const Edge& e : train_neg) {
    train_x.append_row(edge_features(model, e.u, e.v));
    train_y.push_back(0);
  }
  FeatureMatrix test_x;
  std::vector<int> test_y;
  for (const Edge& e : split.pos_edges) {
    test_x.append_row(edge_features(model, e.u, e.v));
    test_y.push_back(1);
  }
  for (const Edge& e : split.neg_edges) {
    test_x.append_row(edge_features(model, e.u, e.v));
    test_y.push_back(0);
  }

  const Standardizer scaler = Standardizer::fit(train_x);
  scaler.apply(train_x);
  scaler.apply(test_x);
  const LogRegFit fit = train_logreg(train_x, train_y, opts);

  std::vector<double> scores(test_x.rows());
  for (std::size_t i = 0; i < test_x.rows(); ++i) scores[i] = fit.model.decision(test_x.row(i));
  LinkPredictionResult result;
  result.auc = auc(scores, test_y);
  result.train_examples = train_x.rows();
  result.test_examples = test_x.rows();
  return result;
}

std::size_t LabelSet::labeled_count() const {
  return static_cast<std::size_t>(std::count_if(label_of.begin(), label_of.end(), [](int l) { return l >= 0; }));
}

LabelSet parse_labels(std::istream& in, std::span<const std::string> node_names) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < node_names.size(); ++i) row_of.emplace(node_names[i], i);
  std::unordered_map<std::string, int> label_id;
  LabelSet out;
  out.label_of.assign(node_names.size(), -1);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string node, label, extra;
    if (!(fields >> node >> label)) throw ParseError("expected 'node label'", line_no);
    if (fields >> extra) throw ParseError("unexpected token '" + extra + "'", line_no);
    auto row = row_of.find(node);
    if (row == row_of.end()) throw ParseError("labeled node '" + node + "' is not in the graph", line_no);
    auto [it, inserted] = label_id.try_emplace(label, static_cast<int>(out.names.size()));
    if (inserted) out.names.push_back(label);
    int& slot = out.label_of[row->second];
    if (slot >= 0 && slot != it->second) {
      throw ParseError("node '" + node + "' has more than one label (multi-label data is not supported)", line_no);
    }
    slot = it->second;
  }
  return out;
}

LabelSet read_labels(const std::string& path, std::span<const std::string> node_names) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open labels file '" + path + "'");
  return parse_labels(in, node_names);
}

FeatureMatrix embedding_features(const EmbeddingModel& model) {
  FeatureMatrix x(model.node_count(), model.dim());
  for (NodeId v = 0; v < model.node_count(); ++v) {
    auto a = model.a(v);
    std::copy(a.begin(), a.end(), x.row(v).begin());
  }
  return x;
}

NodeClassificationResult node_classification(const FeatureMatrix& features, const LabelSet& labels,
                                             double train_ratio, std::size_t runs, std::uint64_t seed,
                                             unsigned threads, const LogRegOptions& opts) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw std::invalid_argument("training ratio must be in (0, 1)");
  if (runs == 0) throw std::invalid_argument("at least one run is required");
  if (labels.label_of.size() != features.rows()) throw std::invalid_argument("labels do not match feature rows");
  std::vector<std::size_t> labeled;
  for (std::size_t i = 0; i < labels.label_of.size(); ++i) {
    if (labels.label_of[i] >= 0) labeled.push_back(i);
  }
  if (labeled.size() < 2) throw std::invalid_argument("need at least two labeled nodes");
  const std::size_t classes = labels.label_count();
  const std::size_t n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(labeled.size()))), 1,
      labeled.size() - 1);

  std::vector<F1Scores> scores(runs);
  std::vector<char> missing(runs, 0);
  auto one_run = [&](std::size_t run) {
    Rng rng = make_rng(seed, {0x4e43ULL, run});
    std::vector<std::size_t> order = labeled;
    std::shuffle(order.begin(), order.end(), rng);

    FeatureMatrix train_x, test_x;
    std::vector<int> train_label, test_label;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const bool train_row = i < n_train;
      (train_row ? train_x : test_x).append_row(features.row(order[i]));
      (train_row ? train_label : test_label).push_back(labels.label_of[order[i]]);
    }
    const Standardizer scaler = Standardizer::fit(train_x);
    scaler.apply(train_x);
    scaler.apply(test_x);

    std::vector<LogisticModel> models(classes);
    std::vector<int> y(train_label.size());
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = train_label[i] == static_cast<int>(c) ? 1 : 0;
      const LogRegFit fit = train_logreg(train_x, y, opts);
      if (fit.constant && std::find(y.begin(), y.end(), 1) == y.end()) missing[run] = 1;
      models[c] = fit.model;
    }
    std::vector<int> predicted(test_label.size());
    for (std::size_t i = 0; i < test_x.rows(); ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < classes; ++c) {
        const double z = models[c].decision(test_x.row(i));
        if (z > best) {
          best = z;
          predicted[i] = static_cast<int>(c);
        }
      }
    }
    scores[run] = micro_macro_f1(predicted, test_label, classes);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(runs)));
  if (workers == 1) {
    for (std::size_t r = 0; r < runs; ++r) one_run(r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t r = t; r < runs; r += workers) one_run(r);
      });
    }
  }

  NodeClassificationResult out;
  out.runs = runs;
  for (std::size_t r = 0; r < runs; ++r) {
    out.micro_mean += scores[r].micro;
    out.macro_mean += scores[r].macro;
    out.runs_missing_class += missing[r] ? 1 : 0;
  }
  out.micro_mean /= static_cast<double>(runs);
  out.macro_mean /= static_cast<double>(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    out.micro_std += (scores[r].micro - out.micro_mean) * (scores[r].micro - out.micro_mean);
    out.macro_std += (scores[r].macro - out.macro_mean) * (scores[r].macro - out.macro_mean);
  }
  out.micro_std = std::sqrt(out.micro_std / static_cast<double>(runs));
  out.macro_std = std::sqrt(out.macro_std / static_cast<double>(runs));
  return out;
}

void write_metrics_csv(std::span<const MetricRow> rows, std::ostream& out) {
  out << "metric,value,run-count,std\n";
  out << std::setprecision(6) << std::fixed;
  for (const auto& r : rows) out << r.metric << ',' << r.value << ',' << r.runs << ',' << r.std << '\n';
  out.unsetf(std::ios::floatfield);
}

void write_metrics_table(std::span<const MetricRow> rows, std::ostream& out) {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.metric.size());
  out << std::left << std::setw(static_cast<int>(width)) << "metric" << "  " << std::right << std::setw(9) << "value"
      << "  " << std::setw(5) << "runs" << "  " << std::setw(9) << "std" << '\n';
  out << std::setprecision(4) << std::fixed;
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << r.metric << "  " << std::right << std::setw(9)
        << r.value << "  " << std::setw(5) << r.runs << "  " << std::setw(9) << r.std << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

}  // namespace kne
