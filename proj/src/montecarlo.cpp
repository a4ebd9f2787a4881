#include "lyap/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "lyap/errors.hpp"
#include "lyap/rng.hpp"

namespace lyap {

namespace {

constexpr int kRenormEvery = 32;

void check_family_chain(const MatrixFamily& family, const MarkovChainSpec& chain) {
  if (family.size() != chain.k())
    throw ValidationError("family-chain-mismatch",
                          "matrix count must equal the chain's symbol count");
}

double replica_gamma(const MatrixFamily& family, const MarkovChainSpec& chain, long n,
                     uint64_t seed, int replica) {
  RngStream rng(seed, static_cast<uint64_t>(replica));
  int sym = chain.sample_initial(rng);
  Mat prod = family[sym].mat();
  Mat scratch(family.dim());
  double log_scale = 0.0;
  for (long m = 2; m <= n; ++m) {
    sym = chain.sample_step(sym, rng);
    matmul_into(prod, family[sym].mat(), scratch);
    prod.a.swap(scratch.a);
    if (m % kRenormEvery == 0) {
      double s = max_abs(prod);
      log_scale += std::log(s);
      scale_in_place(prod, 1.0 / s);
    }
  }
  return (log_scale + std::log(singular_values(prod).front())) / static_cast<double>(n);
}

EstimateResult summarize_replicas(std::vector<double> gammas, long n, const std::string& method) {
  EstimateResult result;
  result.method = method;
  result.n_steps = n;
  result.n_replicas = static_cast<int>(gammas.size());
  double mean = 0.0;
  for (double g : gammas) mean += g;
  mean /= static_cast<double>(gammas.size());
  double var = 0.0;
  for (double g : gammas) var += (g - mean) * (g - mean);
  var /= static_cast<double>(gammas.size() - 1);
  result.gamma_hat = mean;
  result.std_error = std::sqrt(var / static_cast<double>(gammas.size()));

  int blocks = std::min<int>(static_cast<int>(gammas.size()), 16);
  for (int b = 0; b < blocks; ++b) {
    size_t end = static_cast<size_t>(gammas.size()) * (b + 1) / blocks;
    double partial = 0.0;
    for (size_t r = 0; r < end; ++r) partial += gammas[r];
    result.trace.push_back(partial / static_cast<double>(end));
  }
  return result;
}

EstimateResult subadditive_impl(const MatrixFamily& family, const MarkovChainSpec& chain, long n,
                                int replicas, uint64_t seed, bool parallel) {
  check_family_chain(family, chain);
  if (n < 1) throw ValidationError("bad-count", "n must be >= 1");
  if (replicas < 2) throw ValidationError("bad-count", "replicas must be >= 2");
  std::vector<double> gammas(static_cast<size_t>(replicas));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int r = 0; r < replicas; ++r)
    gammas[static_cast<size_t>(r)] = replica_gamma(family, chain, n, seed, r);
  return summarize_replicas(std::move(gammas), n, "subadditive");
}

}  // namespace

EstimateResult estimate_subadditive(const MatrixFamily& family, const MarkovChainSpec& chain,
                                    long n, int replicas, uint64_t seed) {
  return subadditive_impl(family, chain, n, replicas, seed, true);
}

EstimateResult estimate_subadditive_serial(const MatrixFamily& family,
                                           const MarkovChainSpec& chain, long n, int replicas,
                                           uint64_t seed) {
  return subadditive_impl(family, chain, n, replicas, seed, false);
}

EstimateResult estimate_furstenberg(const MatrixFamily& family, const MarkovChainSpec& chain,
                                    long n, long burn_in, uint64_t seed) {
  check_family_chain(family, chain);
  if (burn_in < 0 || n <= burn_in)
    throw ValidationError("bad-count", "need n > burn_in >= 0");

  const MatrixFamily transposed = family.transposed();
  const int d = family.dim();
  RngStream rng(seed, 0);

  long count = n - burn_in;
  long blocks = std::max<long>(2, static_cast<long>(std::floor(std::sqrt(static_cast<double>(count)))));
  long block_len = count / blocks;
  if (block_len < 1) {
    blocks = count;
    block_len = 1;
  }
  long kept = blocks * block_len;

  std::vector<double> x = rng.random_unit_vector(d);
  std::vector<double> y(static_cast<size_t>(d));
  std::vector<double> block_means(static_cast<size_t>(blocks), 0.0);

  int sym = 0;
  double block_sum = 0.0;
  long block_fill = 0, block_idx = 0;
  for (long m = 1; m <= burn_in + kept; ++m) {
    sym = m == 1 ? chain.sample_initial(rng) : chain.sample_step(sym, rng);
    matvec(transposed[sym].mat(), x, y);
    double norm2 = 0.0;
    for (double c : y) norm2 += c * c;
    double norm = std::sqrt(norm2);
    for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] / norm;
    if (m > burn_in) {
      block_sum += std::log(norm);
      if (++block_fill == block_len) {
        block_means[static_cast<size_t>(block_idx++)] = block_sum / static_cast<double>(block_len);
        block_sum = 0.0;
        block_fill = 0;
      }
    }
  }

  EstimateResult result;
  result.method = "furstenberg";
  result.n_steps = kept;
  result.n_replicas = 1;
  double mean = 0.0;
  for (double b : block_means) mean += b;
  mean /= static_cast<double>(blocks);
  result.gamma_hat = mean;
  if (blocks >= 2) {
    double var = 0.0;
    for (double b : block_means) var += (b - mean) * (b - mean);
    var /= static_cast<double>(blocks - 1);
    result.std_error = std::sqrt(var / static_cast<double>(blocks));
  }
  double partial = 0.0;
  for (long b = 0; b < blocks; ++b) {
    partial += block_means[static_cast<size_t>(b)];
    result.trace.push_back(partial / static_cast<double>(b + 1));
  }
  return result;
}

namespace {

// Enumerates all k^n words in lexicographic order, maintaining the prefix
// products and chain factors incrementally. cb(prob_chain, last, psi) where
// prob_chain holds every backward factor except the terminal one and
// psi = M_{i_0} M_{i_1} ... M_{i_{n-1}} (first symbol leftmost).
template <class Cb>
void for_each_word(const MatrixFamily& family, const MarkovChainSpec& chain, int n, Cb&& cb) {
  const int k = chain.k();
  const int d = family.dim();
  std::vector<int> word(static_cast<size_t>(n), 0);
  std::vector<Mat> prefix(static_cast<size_t>(n) + 1);
  std::vector<double> prob(static_cast<size_t>(n), 1.0);
  prefix[0] = Mat::identity(d);
  auto refresh_from = [&](int pos) {
    for (int q = pos; q < n; ++q) {
      prefix[static_cast<size_t>(q) + 1] =
          matmul(prefix[static_cast<size_t>(q)], family[word[static_cast<size_t>(q)]].mat());
      prob[static_cast<size_t>(q)] =
          q == 0 ? 1.0
                 : prob[static_cast<size_t>(q) - 1] *
                       chain.backward(word[static_cast<size_t>(q) - 1], word[static_cast<size_t>(q)]);
    }
  };
  refresh_from(0);
  while (true) {
    cb(prob[static_cast<size_t>(n) - 1], word[static_cast<size_t>(n) - 1],
       prefix[static_cast<size_t>(n)]);
    int pos = n - 1;
    while (pos >= 0 && word[static_cast<size_t>(pos)] == k - 1) --pos;
    if (pos < 0) break;
    ++word[static_cast<size_t>(pos)];
    for (int q = pos + 1; q < n; ++q) word[static_cast<size_t>(q)] = 0;
    refresh_from(pos);
  }
}

void check_budget(int k, int n, double budget) {
  if (n < 0) throw ValidationError("bad-count", "n must be >= 0");
  if (std::pow(static_cast<double>(k), static_cast<double>(n)) > budget)
    throw ValidationError("enumeration-budget", "k^n exceeds the enumeration budget");
}

struct Leaf {
  double prob;
  int last;
  Mat psi;
};

std::vector<Leaf> collect_leaves(const MatrixFamily& family, const MarkovChainSpec& chain, int n) {
  std::vector<Leaf> leaves;
  for_each_word(family, chain, n,
                [&](double prob, int last, const Mat& psi) { leaves.push_back({prob, last, psi}); });
  return leaves;
}

GridFunction enumerate_grid_impl(const MatrixFamily& family, const MarkovChainSpec& chain, int n,
                                 double t, int n_grid, double alpha, double theta, bool parallel) {
  check_family_chain(family, chain);
  if (family.dim() != 2)
    throw ValidationError("unsupported-dimension", "grid enumeration requires d = 2");
  check_budget(chain.k(), n, 1e5);
  const int k = chain.k();
  GridFunction out(k, n_grid, alpha, theta);
  if (n == 0) {
    for (auto& v : out.data()) v = Complex(1.0, 0.0);
    return out;
  }
  const std::vector<Leaf> leaves = collect_leaves(family, chain, n);
#pragma omp parallel for schedule(static) if (parallel)
  for (int m = 0; m < n_grid; ++m) {
    double a = grid_angle(m, n_grid);
    double xv[2] = {std::cos(a), std::sin(a)};
    for (const Leaf& leaf : leaves) {
      double y0 = leaf.psi.at(0, 0) * xv[0] + leaf.psi.at(0, 1) * xv[1];
      double y1 = leaf.psi.at(1, 0) * xv[0] + leaf.psi.at(1, 1) * xv[1];
      double weight = std::exp(t * 0.5 * std::log(y0 * y0 + y1 * y1));
      for (int j = 0; j < k; ++j)
        out.value(j, m) += leaf.prob * chain.backward(leaf.last, j) * weight;
    }
  }
  return out;
}

}  // namespace

double enumerate_exact(const MatrixFamily& family, const MarkovChainSpec& chain, int n, double t,
                       int terminal, const ProjPoint& x) {
  check_family_chain(family, chain);
  if (terminal < 0 || terminal >= chain.k())
    throw ValidationError("symbol-out-of-range", "terminal symbol out of range");
  if (x.dim() != family.dim())
    throw ValidationError("bad-dimension", "point dimension must match the family");
  check_budget(chain.k(), n, 1e7);
  if (n == 0) return 1.0;

  const int d = family.dim();
  std::vector<double> img(static_cast<size_t>(d));
  double total = 0.0;
  for_each_word(family, chain, n, [&](double prob, int last, const Mat& psi) {
    matvec(psi, x.vec(), img);
    double norm2 = 0.0;
    for (double c : img) norm2 += c * c;
    total += prob * chain.backward(last, terminal) * std::exp(t * 0.5 * std::log(norm2));
  });
  return total;
}

GridFunction enumerate_exact_grid(const MatrixFamily& family, const MarkovChainSpec& chain, int n,
                                  double t, int n_grid, double alpha, double theta) {
  return enumerate_grid_impl(family, chain, n, t, n_grid, alpha, theta, true);
}

GridFunction enumerate_exact_grid_serial(const MatrixFamily& family, const MarkovChainSpec& chain,
                                         int n, double t, int n_grid, double alpha, double theta) {
  return enumerate_grid_impl(family, chain, n, t, n_grid, alpha, theta, false);
}

}  // namespace lyap
