// SPDX-License-Identifier: Apache-2.0
#include "pgi/rate_analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pgi {

std::vector<SignalTerms> signal_terms(const PairGrid<CMatrix>& steering, const SelectionState& state) {
  const int M = steering.num_bs();
  const int K = steering.num_users();
  std::vector<SignalTerms> out(K);
  for (int k = 0; k < K; ++k) {
    cplx tr = 0.0;
    double fro_sel = 0.0;
    for (int m = 0; m < M; ++m) {
      const CMatrix& a = steering(m, k);
      for (int j = 0; j < K; ++j)
        if (j != k && state.precoders(m, j).cols() > 0)
          out[k].is += (a.adjoint() * state.precoders(m, j)).squaredNorm();
      const CMatrix& v = state.precoders(m, k);
      if (v.cols() == 0) continue;
      const CMatrix p = a.adjoint() * v;  // P x |set|
      const IndexSet& set = state.index_sets(m, k);
      std::vector<bool> chosen(a.cols(), false);
      for (std::size_t c = 0; c < set.size(); ++c) {
        chosen[set[c]] = true;
        tr += p(set[c], static_cast<Eigen::Index>(c));
      }
      for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const double row = p.row(r).squaredNorm();
        if (chosen[r]) fro_sel += row;
        else out[k].us += row;
      }
    }
    out[k].ds_ideal = std::norm(tr) + fro_sel;
  }
  return out;
}

CMatrix selected_gain_matrix(const PairGrid<CMatrix>& steering, const SelectionState& state, int k) {
  const int n = state.path_count(k);
  CMatrix x = CMatrix::Zero(n, n);
  Eigen::Index off = 0;
  for (int m = 0; m < steering.num_bs(); ++m) {
    const int c = state.path_count(m, k);
    if (c == 0) continue;
    x.block(off, off, c, c) = selected_columns(steering(m, k), state.index_sets(m, k)).adjoint() *
                              state.precoders(m, k);
    off += c;
  }
  return x;
}

double rate_from_powers(double signal, double interference, double noise_var) {
  return std::log2(1.0 + signal / (interference + noise_var));
}

std::vector<double> ideal_rate_closed_form(const PairGrid<CMatrix>& steering,
                                           const SelectionState& state, double noise_var) {
  const auto terms = signal_terms(steering, state);
  std::vector<double> r;
  for (const auto& t : terms) r.push_back(rate_from_powers(t.ds_ideal + t.us, t.is, noise_var));
  return r;
}

void link_powers(const PairGrid<CVector>& channels, const PairGrid<CVector>& precoders,
                 std::vector<double>& signal, std::vector<double>& interference) {
  const int M = channels.num_bs();
  const int K = channels.num_users();
  signal.assign(K, 0.0);
  interference.assign(K, 0.0);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j) {
      cplx s = 0.0;
      for (int m = 0; m < M; ++m)
        if (precoders(m, j).size() > 0) s += channels(m, k).dot(precoders(m, j));
      if (j == k) signal[k] = std::norm(s);
      else interference[k] += std::norm(s);
    }
  }
}

void LinkAccumulator::add(double a, double b, double noise_var) {
  n += 1;
  sa += a;
  sb += b;
  saa += a * a;
  sbb += b * b;
  sab += a * b;
  const double r = rate_from_powers(a, b, noise_var);
  slog += r;
  slog2 += r * r;
}

void LinkAccumulator::merge(const LinkAccumulator& o) {
  n += o.n;
  sa += o.sa;
  sb += o.sb;
  saa += o.saa;
  sbb += o.sbb;
  sab += o.sab;
  slog += o.slog;
  slog2 += o.slog2;
}

RateEstimate LinkAccumulator::instantaneous() const {
  RateEstimate e;
  if (n < 1) return e;
  e.mean = slog / n;
  if (n > 1) e.se = std::sqrt(std::max(0.0, (slog2 - n * e.mean * e.mean) / (n - 1)) / n);
  return e;
}

RateEstimate LinkAccumulator::ratio_of_means(double noise_var) const {
  RateEstimate e;
  if (n < 1) return e;
  const double ma = sa / n, mb = sb / n;
  const double den = mb + noise_var;
  const double r = ma / den;
  e.mean = std::log2(1.0 + r);
  if (n > 1) {
    const double va = std::max(0.0, (saa - n * ma * ma) / (n - 1));
    const double vb = std::max(0.0, (sbb - n * mb * mb) / (n - 1));
    const double cab = (sab - n * ma * mb) / (n - 1);
    const double scale = 1.0 / ((1.0 + r) * std::numbers::ln2);
    const double ga = scale / den;
    const double gb = -scale * ma / (den * den);
    const double var = (ga * ga * va + gb * gb * vb + 2.0 * ga * gb * cab) / n;
    e.se = std::sqrt(std::max(0.0, var));
  }
  return e;
}

std::vector<RateEstimate> mc_rate(const PairGrid<CMatrix>& steering, const PrecoderBuilder& builder,
                                  double noise_var, RateMode mode, int draws, std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("mc_rate: draws must be >= 1");
  const int K = steering.num_users();
  std::vector<LinkAccumulator> acc(K);
  Rng rng(seed);
  std::vector<double> sig, intf;
  for (int t = 0; t < draws; ++t) {
    ChannelRealization draw = assemble_channel(steering, draw_gains(steering, rng));
    const PairGrid<CVector> w = builder(draw, rng);
    link_powers(draw.channels, w, sig, intf);
    for (int k = 0; k < K; ++k) acc[k].add(sig[k], intf[k], noise_var);
  }
  std::vector<RateEstimate> out;
  for (const auto& a : acc)
    out.push_back(mode == RateMode::instantaneous ? a.instantaneous() : a.ratio_of_means(noise_var));
  return out;
}

PairGrid<CVector> pgi_precoders(const SelectionState& state, const std::vector<CVector>& feedback) {
  const int M = state.num_bs();
  const int K = state.num_users();
  if (static_cast<int>(feedback.size()) != K) throw std::invalid_argument("pgi_precoders: one vector per user");
  PairGrid<CVector> w(M, K);
  for (int k = 0; k < K; ++k) {
    if (feedback[k].size() != state.path_count(k)) throw std::invalid_argument("pgi_precoders: feedback length");
    Eigen::Index off = 0;
    for (int m = 0; m < M; ++m) {
      const CMatrix& v = state.precoders(m, k);
      w(m, k) = v.cols() > 0 ? CVector(v * feedback[k].segment(off, v.cols()))
                             : CVector(CVector::Zero(v.rows()));
      off += v.cols();
    }
  }
  return w;
}

PgiFeedback perfect_feedback() {
  return [](const CVector& g, Rng&) { return g; };
}

PgiFeedback rvq_feedback(Codebook codebook) {
  return [cb = std::move(codebook)](const CVector& g, Rng&) { return reconstruct_pgi(quantize_pgi(g, cb), cb); };
}

PgiFeedback rvq_ensemble_feedback(int dim, int bits) {
  return [dim, bits](const CVector& g, Rng& rng) {
    const Codebook cb = gen_rvq_codebook(dim, bits, rng());
    return reconstruct_pgi(quantize_pgi(g, cb), cb);
  };
}

namespace {

struct RatioSums {
  double n = 0, sn = 0, sd = 0, snn = 0, sdd = 0, snd = 0;
  void add(double num, double den) {
    n += 1;
    sn += num;
    sd += den;
    snn += num * num;
    sdd += den * den;
    snd += num * den;
  }
  DistortionEstimate estimate() const {
    DistortionEstimate e;
    if (!(sd > 0.0)) return e;
    const double mn = sn / n, md = sd / n;
    e.mean = mn / md;
    if (n > 1) {
      // Delta method for a ratio of means.
      const double vn = (snn - n * mn * mn) / (n - 1);
      const double vd = (sdd - n * md * md) / (n - 1);
      const double c = (snd - n * mn * md) / (n - 1);
      const double var = (vn - 2.0 * e.mean * c + e.mean * e.mean * vd) / (n * md * md);
      e.se = std::sqrt(std::max(0.0, var));
    }
    return e;
  }
};

}  // namespace

DistortionEstimate measure_distortion(const CMatrix& x, const PgiFeedback& feedback, int trials,
                                      std::uint64_t seed) {
  if (x.rows() != x.cols()) throw std::invalid_argument("measure_distortion: matrix must be square");
  if (trials < 2) throw std::invalid_argument("measure_distortion: trials must be >= 2");
  Rng rng(seed);
  RatioSums sums;
  for (int t = 0; t < trials; ++t) {
    const CVector g = complex_normal_vector(rng, static_cast<int>(x.rows()));
    const CVector gh = feedback(g, rng);
    const CVector xg = x.adjoint() * g;  // (g^H X)^H
    const double ideal = std::norm(xg.dot(g));
    const double got = std::norm(xg.dot(gh));
    sums.add(ideal - got, ideal);
  }
  return sums.estimate();
}

RateBreakdown rate_breakdown(const PairGrid<CMatrix>& steering, const SelectionState& state,
                             double noise_var, const PgiFeedback& feedback, int draws,
                             std::uint64_t seed) {
  const auto terms = signal_terms(steering, state);
  const int K = state.num_users();
  RateBreakdown b;
  for (int k = 0; k < K; ++k) {
    const CMatrix x = selected_gain_matrix(steering, state, k);
    const DistortionEstimate d = measure_distortion(x, feedback, draws, derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    const double ds = terms[k].ds_ideal * (1.0 - d.mean);
    b.ds.push_back(ds);
    b.ds_ideal.push_back(terms[k].ds_ideal);
    b.us.push_back(terms[k].us);
    b.is.push_back(terms[k].is);
    b.distortion.push_back(d.mean);
    b.distortion_se.push_back(d.se);
    b.rate_ideal.push_back(rate_from_powers(terms[k].ds_ideal + terms[k].us, terms[k].is, noise_var));
    b.rate_realistic.push_back(rate_from_powers(ds + terms[k].us, terms[k].is, noise_var));
  }
  return b;
}

double quadratic_moment_closed_form(const CMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("quadratic_moment_closed_form: matrix must be square");
  const double l = static_cast<double>(a.rows());
  if (l == 0) return 0.0;
  return (std::norm(a.trace()) + a.squaredNorm()) / (l * (l + 1.0));
}

double slnr_value(const CVector& x, const CVector& mu, const std::vector<CMatrix>& gammas, int own,
                  double noise_var) {
  if (own < 0 || own >= static_cast<int>(gammas.size())) throw std::out_of_range("slnr_value: own index");
  double num = std::norm(mu.dot(x));
  double den = noise_var;
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    const double q = x.dot(gammas[j] * x).real();
    if (static_cast<int>(j) == own) num += q;
    else den += q;
  }
  return num / den;
}

double slnr_value(const CVector& x, const SlnrOperands& ops) {
  const int K = ops.gram.empty() ? 0 : static_cast<int>(ops.gram[0].size());
  std::vector<CMatrix> gammas;
  for (int j = 0; j < K; ++j) gammas.push_back(ops.gamma(j));
  return slnr_value(x, ops.mu, gammas, ops.user, ops.noise_per_bs * ops.num_bs);
}

}  // namespace pgi
