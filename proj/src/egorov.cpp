#include "sgwp/egorov.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "sgwp/observables.hpp"
#include "sgwp/packet.hpp"
#include "sgwp/rng.hpp"

namespace sgwp {
namespace {

constexpr std::size_t kBlockSize = 1024;
constexpr std::size_t kBlocksPerWave = 256;

Mat lower_factor(const Mat& cov) {
  if (cov.isZero(0.0)) return Mat::Zero(cov.rows(), cov.cols());
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) require_positive_definite(cov, "sampling covariance");
  return llt.matrixL();
}

// Per-block running statistics, one (mean, M2) pair per observable and time,
// all sharing the block's sample count.
struct BlockStats {
  std::size_t count = 0;
  std::size_t excluded = 0;
  std::vector<double> mean;
  std::vector<double> m2;
};

// Chan et al. pairwise update of `acc` with `b`.
void merge(BlockStats& acc, const BlockStats& b) {
  acc.excluded += b.excluded;
  if (b.count == 0) return;
  if (acc.count == 0) {
    const std::size_t ex = acc.excluded;
    acc = b;
    acc.excluded = ex;
    return;
  }
  const double na = static_cast<double>(acc.count);
  const double nb = static_cast<double>(b.count);
  const double n = na + nb;
  for (std::size_t k = 0; k < acc.mean.size(); ++k) {
    const double delta = b.mean[k] - acc.mean[k];
    acc.mean[k] += delta * nb / n;
    acc.m2[k] += b.m2[k] + delta * delta * na * nb / n;
  }
  acc.count += b.count;
}

}  // namespace

PhaseEnsemble::PhaseEnsemble(State state0, double hbar, std::uint64_t seed, std::size_t count)
    : state0_(std::move(state0)), hbar_(hbar), seed_(seed), count_(count) {
  if (count_ < 1) throw std::invalid_argument("ensemble needs at least one sample");
  if (!(hbar_ >= 0)) throw std::invalid_argument("hbar must be non-negative");
  require_positive_definite(state0_.B);
  x_factor_ = lower_factor((hbar_ / 2) * state0_.B.inverse());
  eta_factor_ = lower_factor((hbar_ / 2) * state0_.B);
}

PhaseSample PhaseEnsemble::sample(std::size_t i) const {
  const int d = state0_.dim();
  CounterStream rng(seed_, i);
  Vec u(d), w(d);
  for (int k = 0; k < d; ++k) u(k) = rng.normal();
  for (int k = 0; k < d; ++k) w(k) = rng.normal();
  PhaseSample s;
  const Vec dx = x_factor_ * u;
  s.x = state0_.q + dx;
  s.xi = state0_.p + state0_.A * dx + eta_factor_ * w;
  return s;
}

std::vector<PhaseSample> PhaseEnsemble::materialize() const {
  std::vector<PhaseSample> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(sample(i));
  return out;
}

PhaseEnsemble wigner_sample(const State& state0, double hbar, std::uint64_t seed,
                            std::size_t count) {
  return PhaseEnsemble(state0, hbar, seed, count);
}

std::string Observable::name() const {
  switch (kind) {
    case Kind::position:
      return "q" + std::to_string(component + 1);
    case Kind::momentum:
      return "p" + std::to_string(component + 1);
    case Kind::energy:
      return "H0";
    case Kind::angular_momentum:
      return "Lz";
  }
  return {};
}

double Observable::evaluate(const ClassicalPoint& z, const FieldModel<double>& model) const {
  switch (kind) {
    case Kind::position:
      return z.q(component);
    case Kind::momentum:
      return z.p(component);
    case Kind::energy:
      return classical_hamiltonian(z, model);
    case Kind::angular_momentum:
      return z.q(0) * z.p(1) - z.q(1) * z.p(0);
  }
  return 0.0;
}

std::vector<Observable> default_observables(int dim) {
  std::vector<Observable> out;
  for (int i = 0; i < dim; ++i) out.push_back({Observable::Kind::position, i});
  for (int i = 0; i < dim; ++i) out.push_back({Observable::Kind::momentum, i});
  out.push_back({Observable::Kind::energy, 0});
  if (dim == 2) out.push_back({Observable::Kind::angular_momentum, 0});
  return out;
}

std::vector<Observable> parse_observables(std::string_view list, int dim) {
  std::vector<Observable> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t end = std::min(list.find(',', pos), list.size());
    std::string tok(list.substr(pos, end - pos));
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    pos = end + 1;
    if (tok.empty()) continue;
    if (tok == "H0") {
      out.push_back({Observable::Kind::energy, 0});
    } else if (tok == "Lz") {
      if (dim != 2) throw std::invalid_argument("observable Lz needs d = 2");
      out.push_back({Observable::Kind::angular_momentum, 0});
    } else if ((tok[0] == 'q' || tok[0] == 'p') && tok.size() > 1) {
      int comp = 0;
      try {
        comp = std::stoi(tok.substr(1));
      } catch (const std::exception&) {
        throw std::invalid_argument("unknown observable '" + tok + "'");
      }
      if (comp < 1 || comp > dim)
        throw std::invalid_argument("observable '" + tok + "' out of range for d = " +
                                    std::to_string(dim));
      out.push_back({tok[0] == 'q' ? Observable::Kind::position : Observable::Kind::momentum,
                     comp - 1});
    } else {
      throw std::invalid_argument("unknown observable '" + tok +
                                  "' (expected qN, pN, H0 or Lz)");
    }
  }
  if (out.empty()) throw std::invalid_argument("no observables requested");
  return out;
}

std::size_t EgorovEstimate::index_of(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return k;
  throw std::out_of_range("estimate has no observable '" + std::string(name) + "'");
}

std::size_t EgorovEstimate::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  throw std::out_of_range("time " + std::to_string(t) + " is not on the output grid");
}

EgorovEstimate propagate_ensemble(const PhaseEnsemble& ensemble, const FieldModel<double>& model,
                                  double dt, double t_final,
                                  std::span<const Observable> observables,
                                  const EgorovOptions& options) {
  if (observables.empty()) throw std::invalid_argument("no observables requested");
  if (ensemble.initial_state().dim() != model.dim())
    throw std::invalid_argument("ensemble and model dimensions differ");
  const TimeGrid grid(dt, t_final);
  const std::size_t n_times = grid.steps() + 1;
  const std::size_t n_obs = observables.size();
  const std::size_t width = n_obs * n_times;

  auto rhs = [&model](const ClassicalPoint& z) { return classical_rhs(z, model); };

  auto run_block = [&](std::size_t block, BlockStats& stats) {
    stats.count = 0;
    stats.excluded = 0;
    stats.mean.assign(width, 0.0);
    stats.m2.assign(width, 0.0);
    std::vector<double> values(width);
    const std::size_t first = block * kBlockSize;
    const std::size_t last = std::min(first + kBlockSize, ensemble.size());
    for (std::size_t i = first; i < last; ++i) {
      const PhaseSample s = ensemble.sample(i);
      ClassicalPoint z{s.x, s.xi};
      bool ok = true;
      for (std::size_t t = 0; t < n_times && ok; ++t) {
        if (t > 0) z = rk4_step(rhs, z, grid.step(t));
        for (std::size_t k = 0; k < n_obs; ++k) {
          const double v = observables[k].evaluate(z, model);
          if (!std::isfinite(v)) {
            ok = false;
            break;
          }
          values[k * n_times + t] = v;
        }
      }
      if (!ok) {
        ++stats.excluded;
        continue;
      }
      ++stats.count;
      const double inv = 1.0 / static_cast<double>(stats.count);
      for (std::size_t j = 0; j < width; ++j) {
        const double delta = values[j] - stats.mean[j];
        stats.mean[j] += delta * inv;
        stats.m2[j] += delta * (values[j] - stats.mean[j]);
      }
    }
  };

  unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, workers);
  const std::size_t n_blocks = (ensemble.size() + kBlockSize - 1) / kBlockSize;

  BlockStats total;
  total.mean.assign(width, 0.0);
  total.m2.assign(width, 0.0);
  std::vector<BlockStats> wave(std::min(n_blocks, kBlocksPerWave));
  for (std::size_t wave_start = 0; wave_start < n_blocks; wave_start += kBlocksPerWave) {
    const std::size_t wave_len = std::min(kBlocksPerWave, n_blocks - wave_start);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t b = next++; b < wave_len; b = next++) run_block(wave_start + b, wave[b]);
    };
    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, wave_len));
    if (n_threads <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(n_threads);
      for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(work);
    }
    // Fixed-order reduction keeps the result independent of scheduling.
    for (std::size_t b = 0; b < wave_len; ++b) merge(total, wave[b]);
  }

  EgorovEstimate est;
  est.used = total.count;
  est.excluded = total.excluded;
  est.times.resize(n_times);
  for (std::size_t t = 0; t < n_times; ++t) est.times[t] = grid.time(t);
  for (const auto& o : observables) est.names.push_back(o.name());
  est.mean.assign(n_obs, std::vector<double>(n_times, 0.0));
  est.se.assign(n_obs, std::vector<double>(n_times, 0.0));
  const double n = static_cast<double>(total.count);
  for (std::size_t k = 0; k < n_obs; ++k) {
    for (std::size_t t = 0; t < n_times; ++t) {
      const std::size_t j = k * n_times + t;
      est.mean[k][t] = total.count ? total.mean[j] : std::nan("");
      est.se[k][t] = total.count > 1 ? std::sqrt(total.m2[j] / (n - 1) / n) : 0.0;
    }
  }
  return est;
}

double phase_error(const Vec& q, const Vec& p, const EgorovEstimate& estimate, double t_star) {
  const std::size_t t = estimate.time_index(t_star);
  double sum = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    const double dq = estimate.mean[estimate.index_of("q" + std::to_string(i + 1))][t] - q(i);
    const double dp = estimate.mean[estimate.index_of("p" + std::to_string(i + 1))][t] - p(i);
    sum += dq * dq + dp * dp;
  }
  return std::sqrt(sum);
}

}  // namespace sgwp
