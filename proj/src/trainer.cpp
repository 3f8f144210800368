#include "kne/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace kne {

namespace {

constexpr std::uint64_t kTrainStream = 0x545241494eULL;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

[[noreturn]] void report_non_finite(NodeId center, NodeId context, float lr) {
  std::ostringstream msg;
  msg << "non-finite parameter after update of pair (center " << center << ", context " << context
      << ") at learning rate " << lr;
  throw NonFiniteError(msg.str());
}

// Shared body of the sequential and concurrent steps. In concurrent mode the
// coefficients are read and written through atomic_ref; rows are updated
// without synchronization.
float step(EmbeddingModel& model, const KernelBank& bank, NodeId center, NodeId context,
           const NoiseDistribution& noise, std::size_t negatives, float lr, float lambda, float beta, Rng& rng,
           UpdateWorkspace& ws, bool concurrent, std::vector<float>& c_snapshot) {
  ws.negatives.resize(negatives);
  for (auto& x : ws.negatives) x = noise.sample(rng);

  std::span<const float> c = model.c();
  if (concurrent) {
    c_snapshot.resize(model.kernel_count());
    for (std::size_t t = 0; t < c_snapshot.size(); ++t) {
      c_snapshot[t] = std::atomic_ref<float>(model.c()[t]).load(std::memory_order_relaxed);
    }
    c = c_snapshot;
  }
  compute_pair_gradients<float>(model, c, bank, center, context, ws.negatives, lambda, beta, ws.grads);

  const std::size_t d = model.dim();
  bool finite = true;
  for (std::size_t slot = 0; slot < ws.grads.rows.size(); ++slot) {
    auto row = model.a(ws.grads.rows[slot]);
    const float* g = ws.grads.grad_a.data() + slot * d;
    for (std::size_t i = 0; i < d; ++i) {
      row[i] -= lr * g[i];
      finite &= std::isfinite(row[i]);
    }
  }
  auto bv = model.b(center);
  for (std::size_t i = 0; i < d; ++i) {
    bv[i] -= lr * ws.grads.grad_b[i];
    finite &= std::isfinite(bv[i]);
  }
  if (bank.size() > 1) {
    for (std::size_t t = 0; t < bank.size(); ++t) {
      const float delta = -lr * ws.grads.grad_c[t];
      finite &= std::isfinite(delta);
      if (concurrent) {
        std::atomic_ref<float>(model.c()[t]).fetch_add(delta, std::memory_order_relaxed);
      } else {
        model.c()[t] += delta;
      }
    }
  }
  if (!finite) report_non_finite(center, context, lr);
  return ws.grads.loss;
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (dim < 1) fail("dimension must be >= 1");
  if (window < 1) fail("window must be >= 1");
  if (walk_length < 1) fail("walk length must be >= 1");
  if (walks_per_node < 1) fail("walks per node must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be >= 0");
  if (!(lr_min > 0.0)) fail("minimum learning rate must be > 0");
  if (!(lr > lr_min) || !std::isfinite(lr)) fail("learning rate must exceed the minimum learning rate");
  if (!(noise_power >= 0.0)) fail("noise power must be >= 0");
  if (!(p > 0.0) || !(q > 0.0)) fail("p and q must be > 0");
  if (kernels.size() < 1) fail("at least one kernel is required");
  for (const auto& k : kernels.kernels()) k.validate();
  if (threads < 1) fail("threads must be >= 1");
}

NoiseDistribution::NoiseDistribution(std::span<const double> weights) {
  std::vector<double> support_weights;
  double total = 0.0;
  for (NodeId v = 0; v < weights.size(); ++v) {
    if (weights[v] > 0.0) {
      support_.push_back(v);
      support_weights.push_back(weights[v]);
      total += weights[v];
    }
  }
  if (support_.empty()) throw std::invalid_argument("noise distribution has empty support");
  table_ = AliasTable(support_weights);
  probs_.assign(weights.size(), 0.0);
  for (std::size_t i = 0; i < support_.size(); ++i) probs_[support_[i]] = support_weights[i] / total;
}

NoiseDistribution NoiseDistribution::uniform(NodeId n) {
  std::vector<double> w(n, 1.0);
  return NoiseDistribution(w);
}

NoiseDistribution build_noise_distribution(const WalkCorpus& corpus, NodeId node_count, double power) {
  if (corpus.tokens().empty()) throw std::invalid_argument("cannot build noise distribution from an empty corpus");
  std::vector<double> counts(node_count, 0.0);
  for (NodeId v : corpus.tokens()) {
    if (v >= node_count) throw std::out_of_range("corpus node id out of range");
    counts[v] += 1.0;
  }
  for (double& c : counts) c = c > 0.0 ? std::pow(c, power) : 0.0;
  return NoiseDistribution(counts);
}

std::vector<std::pair<NodeId, NodeId>> extract_pairs(const WalkCorpus& corpus, std::size_t window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(count_pairs(corpus, window));
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for_each_pair(corpus.walk(i), window, [&](NodeId v, NodeId u) { out.emplace_back(v, u); });
  }
  return out;
}

std::size_t count_pairs(const WalkCorpus& corpus, std::size_t window) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::size_t len = corpus.walk(i).size();
    for (std::size_t l = 0; l < len; ++l) total += std::min(window, l) + std::min(window, len - 1 - l);
  }
  return total;
}

double lr_schedule(std::size_t processed, std::size_t total, double lr0, double lr_min) {
  if (total == 0) return lr0;
  const double frac = static_cast<double>(processed) / static_cast<double>(total);
  return std::max(lr_min, lr0 * (1.0 - frac));
}

float update_emb(EmbeddingModel& model, const KernelBank& bank, NodeId center, NodeId context,
                 const NoiseDistribution& noise, std::size_t negatives, float lr, float lambda, float beta,
                 Rng& rng, UpdateWorkspace& ws) {
  if (!(lr >= 0.0f)) throw std::invalid_argument("learning rate must be >= 0");
  std::vector<float> unused;
  return step(model, bank, center, context, noise, negatives, lr, lambda, beta, rng, ws, false, unused);
}

TrainResult train_on_corpus(const WalkCorpus& corpus, NodeId node_count, const TrainConfig& cfg,
                            const ProgressFn& progress) {
  cfg.validate();
  TrainResult result;
  result.model = EmbeddingModel(node_count, cfg.dim, cfg.kernels.size());
  result.model.initialize(cfg.seed);
  result.stats.walks = corpus.size();

  const std::size_t total = count_pairs(corpus, cfg.window);
  result.stats.pairs = total;
  if (total == 0) return result;

  const auto start = std::chrono::steady_clock::now();
  const NoiseDistribution noise = build_noise_distribution(corpus, node_count, cfg.noise_power);
  const auto lambda = static_cast<float>(cfg.lambda);
  const auto beta = static_cast<float>(cfg.beta);
  constexpr std::size_t kReportEvery = 1 << 20;

  if (cfg.threads <= 1) {
    Rng rng = make_rng(cfg.seed, {kTrainStream});
    UpdateWorkspace ws;
    std::vector<float> unused;
    std::size_t processed = 0;
    double loss_sum = 0.0;
    for (std::size_t w = 0; w < corpus.size(); ++w) {
      for_each_pair(corpus.walk(w), cfg.window, [&](NodeId v, NodeId u) {
        const auto lr = static_cast<float>(lr_schedule(processed, total, cfg.lr, cfg.lr_min));
        loss_sum += step(result.model, cfg.kernels, v, u, noise, cfg.negatives, lr, lambda, beta, rng, ws,
                         false, unused);
        if (++processed % kReportEvery == 0 && progress) progress(processed, total);
      });
    }
    result.stats.mean_pair_loss = loss_sum / static_cast<double>(total);
  } else {
    // Workers own contiguous walk ranges and share rows without locks.
    std::atomic<std::size_t> processed{0};
    std::atomic<double> loss_total{0.0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const unsigned threads = cfg.threads;
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            Rng rng = make_rng(cfg.seed, {kTrainStream, t});
            UpdateWorkspace ws;
            std::vector<float> c_snapshot;
            const std::size_t begin = corpus.size() * t / threads;
            const std::size_t end = corpus.size() * (t + 1) / threads;
            std::size_t local = 0;
            double local_loss = 0.0;
            for (std::size_t w = begin; w < end; ++w) {
              for_each_pair(corpus.walk(w), cfg.window, [&](NodeId v, NodeId u) {
                const std::size_t seen = processed.load(std::memory_order_relaxed) + local;
                const auto lr = static_cast<float>(lr_schedule(std::min(seen, total), total, cfg.lr, cfg.lr_min));
                local_loss += step(result.model, cfg.kernels, v, u, noise, cfg.negatives, lr, lambda, beta,
                                   rng, ws, true, c_snapshot);
                if (++local == 10000) {
                  const std::size_t now = processed.fetch_add(local) + local;
                  local = 0;
                  if (t == 0 && progress && now % kReportEvery < 10000 * threads) progress(now, total);
                }
              });
            }
            processed.fetch_add(local);
            loss_total.fetch_add(local_loss);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        });
      }
    }
    if (error) std::rethrow_exception(error);
    result.stats.mean_pair_loss = loss_total.load() / static_cast<double>(total);
  }
  if (progress) progress(total, total);
  result.stats.train_seconds = seconds_since(start);
  return result;
}

TrainResult train(const Graph& g, const TrainConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const TransitionModel tm(g, cfg.p, cfg.q);
  const WalkCorpus corpus =
      generate_walks(tm, {.walks_per_node = cfg.walks_per_node, .length = cfg.walk_length, .seed = cfg.seed,
                          .threads = cfg.threads});
  const double walk_seconds = seconds_since(start);
  TrainResult result = train_on_corpus(corpus, g.node_count(), cfg, progress);
  result.stats.walk_seconds = walk_seconds;
  return result;
}

double mean_corpus_loss(const EmbeddingModel& model, const KernelBank& bank, const WalkCorpus& corpus,
                        std::size_t window, const NoiseDistribution& noise, std::size_t negatives,
                        std::uint64_t seed) {
  Rng rng = make_rng(seed, {0x4556414cULL});
  std::vector<NodeId> negs(negatives);
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t w = 0; w < corpus.size(); ++w) {
    for_each_pair(corpus.walk(w), window, [&](NodeId v, NodeId u) {
      for (auto& x : negs) x = noise.sample(rng);
      total += pair_loss<float>(model, bank, v, u, negs);
      ++pairs;
    });
  }
  return pairs ? total / static_cast<double>(pairs) : 0.0;
}

}  // namespace kne
