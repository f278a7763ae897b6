// SPDX-License-Identifier: Apache-2.0
#include "pgi/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "pgi/aod_estimation.hpp"
#include "pgi/core_model.hpp"
#include "pgi/feedback.hpp"
#include "pgi/path_selection.hpp"
#include "pgi/pilot_training.hpp"
#include "pgi/random.hpp"
#include "pgi/rate_analysis.hpp"

namespace pgi {

bool TrialResult::has(Scheme s) const {
  return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

const std::vector<double>& TrialResult::rates(Scheme s) const {
  auto it = std::find(schemes.begin(), schemes.end(), s);
  if (it == schemes.end()) throw std::out_of_range(std::string("trial has no scheme ") + scheme_name(s));
  return user_rates[static_cast<std::size_t>(it - schemes.begin())];
}

double TrialResult::sum_rate(Scheme s) const {
  double t = 0.0;
  for (double r : rates(s)) t += r;
  return t;
}

namespace {

enum SeedTag : std::uint64_t { kGeometry = 0, kMusic, kRandomPath, kPilots, kCodebooks, kDraws };

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  }
  void vec(const CVector& v) { bytes(v.data(), sizeof(cplx) * static_cast<std::size_t>(v.size())); }
  void mat(const CMatrix& m) { bytes(m.data(), sizeof(cplx) * static_cast<std::size_t>(m.size())); }
};

// One inner channel draw shared by every scheme.
struct Draw {
  ChannelRealization channel;
  std::vector<CVector> pilot_noise;
};

void hash_draw(Fnv1a& f, const Draw& d) {
  for (const auto& g : d.channel.gains) f.vec(g);
  for (const auto& z : d.pilot_noise) f.vec(z);
}

// Precoded training, LMMSE, and RVQ feedback for one selection.
struct PgiPipeline {
  const SelectionState* state = nullptr;
  PilotPlan plan;
  std::vector<Codebook> codebooks;
  double pilot_noise = 0.0;

  PairGrid<CVector> precoders(const Draw& d) const {
    const int M = state->num_bs();
    const int K = state->num_users();
    const auto obs = simulate_training(d.channel.channels, plan, pilot_noise, d.pilot_noise);
    std::vector<CVector> fed(K);
    for (int k = 0; k < K; ++k) {
      CVector est(state->path_count(k));
      Eigen::Index off = 0;
      for (int m = 0; m < M; ++m) {
        const int c = state->path_count(m, k);
        if (c == 0) continue;
        est.segment(off, c) = lmmse_pgi(obs[k], plan.sequences.blocks(m, k), pilot_noise);
        off += c;
      }
      fed[k] = est.norm() > 0.0 ? reconstruct_pgi(quantize_pgi(est, codebooks[k]), codebooks[k])
                                : CVector(CVector::Zero(est.size()));
    }
    return pgi_precoders(*state, fed);
  }
};

}  // namespace

TrialResult run_trial(const SystemConfig& config, std::uint64_t trial_seed) {
  TrialResult out;
  out.seed = trial_seed;
  out.schemes.push_back(Scheme::proposed);
  for (Scheme s : {Scheme::rvq_csi, Scheme::random_path, Scheme::ideal_pgi})
    if (config.baseline_enabled(s)) out.schemes.push_back(s);
  try {
    config.validate();
    const int M = config.num_bs, K = config.num_users, N = config.num_antennas, P = config.num_paths;
    const int L = config.path_budget;

    const Geometry geo = draw_scenario(config, derive_seed(trial_seed, {kGeometry}));
    const PairGrid<CMatrix> truth = steering_from_angles(geo.path_aods, N, config.spacing_ratio);

    PairGrid<CMatrix> known = truth;
    if (config.use_estimated_aods) {
      Rng rng(derive_seed(trial_seed, {kMusic}));
      const double ul_noise = P * std::pow(10.0, -config.music_snr_db / 10.0);
      const auto grid = angle_grid(0.1);
      for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
          const auto snaps = uplink_snapshots(truth(m, k), config.music_snapshots, ul_noise, rng);
          const auto spectrum = music_spectrum(sample_covariance(snaps), P, grid, config.spacing_ratio);
          AodEstimate est = estimate_aods(spectrum, P);
          if (est.angles.empty()) throw std::runtime_error("MUSIC found no spectral peak");
          if (est.shortfall) {
            ++out.music_shortfalls;
            const double strongest = est.angles.front();
            while (static_cast<int>(est.angles.size()) < P) est.angles.push_back(strongest);
          }
          known(m, k) = steering_matrix(Eigen::Map<const RVector>(est.angles.data(), P), N, config.spacing_ratio);
        }
      }
    }

    const double sigma2 = calibrate_noise_variance_selected(truth, L, config.snr_db);
    out.noise_var = sigma2;
    const double pilot_noise = config.pilot_noise(sigma2);

    Fnv1a real;
    for (const auto& a : truth) real.mat(a);
    real.bytes(&sigma2, sizeof sigma2);
    out.realization_digest = real.h;

    const SelectionState proposed = select_dominating_paths(known, L, sigma2);
    std::vector<Codebook> pgi_books, csi_books;
    for (int k = 0; k < K; ++k) {
      pgi_books.push_back(gen_rvq_codebook(L, config.feedback_bits,
                                           derive_seed(trial_seed, {kCodebooks, config.codebook_seed_offset, 2u * k})));
      if (config.baseline_enabled(Scheme::rvq_csi))
        csi_books.push_back(gen_rvq_codebook(M * N, config.feedback_bits,
                                             derive_seed(trial_seed, {kCodebooks, config.codebook_seed_offset, 2u * k + 1})));
    }

    PgiPipeline prop{&proposed, make_pilot_plan(known, proposed.index_sets, derive_seed(trial_seed, {kPilots, 0})),
                     pgi_books, pilot_noise};
    out.regularized_pilots += prop.plan.regularized_count;

    SelectionState random_state;
    PgiPipeline rnd;
    const bool use_random = config.baseline_enabled(Scheme::random_path);
    if (use_random) {
      Rng rr(derive_seed(trial_seed, {kRandomPath}));
      random_state = random_path_selection(known, L, sigma2, rr);
      rnd = PgiPipeline{&random_state, make_pilot_plan(known, random_state.index_sets, derive_seed(trial_seed, {kPilots, 1})),
                        pgi_books, pilot_noise};
      out.regularized_pilots += rnd.plan.regularized_count;
    }
    const bool use_csi = config.baseline_enabled(Scheme::rvq_csi);

    const std::size_t S = out.schemes.size();
    std::vector<std::vector<LinkAccumulator>> acc(S, std::vector<LinkAccumulator>(K));
    std::vector<Fnv1a> digests(S);
    Rng draw_rng(derive_seed(trial_seed, {kDraws}));
    const double noise_sd = std::sqrt(pilot_noise);
    std::vector<double> sig, intf;
    auto record = [&](std::size_t s, const Draw& d, const PairGrid<CVector>& w) {
      hash_draw(digests[s], d);
      link_powers(d.channel.channels, w, sig, intf);
      for (int k = 0; k < K; ++k) acc[s][k].add(sig[k], intf[k], sigma2);
    };
    for (int t = 0; t < config.gain_draws; ++t) {
      Draw d;
      d.channel = assemble_channel(truth, draw_gains(truth, draw_rng));
      d.pilot_noise.resize(K);
      for (auto& z : d.pilot_noise) z = noise_sd * complex_normal_vector(draw_rng, prop.plan.sequences.length);
      for (std::size_t s = 0; s < S; ++s) {
        switch (out.schemes[s]) {
          case Scheme::proposed: record(s, d, prop.precoders(d)); break;
          case Scheme::random_path: record(s, d, rnd.precoders(d)); break;
          case Scheme::rvq_csi: {
            if (!use_csi) break;
            PairGrid<CVector> est(M, K);
            for (int k = 0; k < K; ++k) {
              std::vector<CVector> hk;
              for (int m = 0; m < M; ++m) hk.push_back(d.channel.channels(m, k));
              auto rec = csi_baseline_feedback(hk, csi_books[k]);
              for (int m = 0; m < M; ++m) est(m, k) = std::move(rec[m]);
            }
            record(s, d, rzf_precoders(est, K * sigma2));
            break;
          }
          case Scheme::ideal_pgi: break;
        }
      }
    }

    out.user_rates.resize(S);
    out.draw_digest.assign(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
      if (out.schemes[s] == Scheme::ideal_pgi) {
        out.user_rates[s] = ideal_rate_closed_form(truth, proposed, sigma2);
        continue;
      }
      out.draw_digest[s] = digests[s].h;
      for (int k = 0; k < K; ++k) out.user_rates[s].push_back(acc[s][k].ratio_of_means(sigma2).mean);
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
    out.user_rates.clear();
    out.draw_digest.clear();
  }
  return out;
}

std::vector<TrialResult> run_trials(const SystemConfig& config, std::uint64_t group, int count) {
  std::vector<TrialResult> results(std::max(count, 0));
  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max(count, 1))));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++)
      results[i] = run_trial(config, derive_seed(config.master_seed, {group, static_cast<std::uint64_t>(i)}));
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i].failed)
      fmt::print(stderr, "trial {} (group {}, seed {}) failed: {}\n", i, group, results[i].seed, results[i].error);
  return results;
}

SystemConfig config_for_axis(const SystemConfig& base, const std::string& axis, double value) {
  if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end())
    throw std::invalid_argument("invalid sweep axis: " + axis);
  SystemConfig c = base;
  set_config_field(c, axis, value);
  if (axis == "num_paths") c.path_budget = 2 * c.num_paths;
  c.validate();
  return c;
}

SeriesPoint aggregate(const std::vector<TrialResult>& trials, Scheme scheme) {
  SeriesPoint p;
  double s = 0.0, s2 = 0.0;
  for (const auto& t : trials) {
    if (t.failed) {
      ++p.failed;
      continue;
    }
    const double r = t.sum_rate(scheme);
    s += r;
    s2 += r * r;
    ++p.trials;
  }
  if (p.trials > 0) p.mean = s / p.trials;
  if (p.trials > 1) {
    const double var = std::max(0.0, (s2 - p.trials * p.mean * p.mean) / (p.trials - 1));
    p.ci95 = 1.96 * std::sqrt(var / p.trials);
  }
  return p;
}

const SweepSeries& SweepResult::find(const std::string& scheme) const {
  for (const auto& s : series)
    if (s.scheme == scheme) return s;
  throw std::out_of_range("sweep has no series " + scheme);
}

SweepResult run_sweep(const SystemConfig& config, const std::string& axis,
                      const std::vector<double>& values, int trials) {
  if (values.empty()) throw std::invalid_argument("run_sweep: no axis values");
  if (trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
  SweepResult r;
  r.axis_name = axis;
  r.axis_values = values;
  r.master_seed = config.master_seed;
  r.config_snapshot = config_snapshot(config);
  std::vector<Scheme> schemes{Scheme::proposed};
  for (Scheme s : {Scheme::rvq_csi, Scheme::random_path, Scheme::ideal_pgi})
    if (config.baseline_enabled(s)) schemes.push_back(s);
  for (Scheme s : schemes) r.series.push_back({scheme_name(s), {}});
  for (std::size_t v = 0; v < values.size(); ++v) {
    const SystemConfig c = config_for_axis(config, axis, values[v]);
    r.trials.push_back(run_trials(c, v, trials));
    for (std::size_t s = 0; s < schemes.size(); ++s) r.series[s].points.push_back(aggregate(r.trials.back(), schemes[s]));
  }
  return r;
}

}  // namespace pgi
