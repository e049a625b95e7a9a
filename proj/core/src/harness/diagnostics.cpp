#include "eqppo/harness/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "eqppo/common/errors.hpp"
#include "eqppo/rl/gaussian.hpp"

namespace eqppo::harness {

int advantage_bin(double a) {
  const double width = 2.0 * kAdvantageRange / kAdvantageBins;
  const int b = static_cast<int>(std::floor((a + kAdvantageRange) / width));
  return std::clamp(b, 0, kAdvantageBins - 1);
}

namespace {

constexpr double kLog10E = 0.43429448190325182765;

struct Accumulator {
  std::vector<double> xs;
  Summary summary() const {
    Summary s;
    s.count = static_cast<int>(xs.size());
    if (xs.empty()) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / s.count;
    double v = 0.0;
    for (double x : xs) v += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(v / s.count);
    return s;
  }
};

}  // namespace

std::vector<NudgeReport> nudge_diagnostics(const eqprop::LayeredEnergyNet<float>& policy, const RolloutData& data,
                                           const RowVectorD& log_sigma, int sample_count,
                                           const rl::ClipConfig& base_clip, const DiagnosticsConfig& cfg) {
  if (sample_count < 0 || sample_count > data.size())
    throw ContractError("sample_count must be in [0, rollout size]");
  std::vector<int> rows(static_cast<std::size_t>(data.size()));
  std::iota(rows.begin(), rows.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(static_cast<std::size_t>(sample_count));

  std::vector<NudgeReport> reports;
  if (sample_count == 0) return reports;
  const rl::PolicyBatch batch = data.policy_batch(rows, log_sigma);
  const MatrixF input = data.input_rows(rows).cast<float>();
  const int n = sample_count;

  for (double eps_rev : cfg.eps_rev) {
    rl::ClipConfig clip = base_clip;
    clip.epsilon_rev = eps_rev;
    clip.beta_ep = cfg.beta;
    clip.validate();

    // Per-sample signed extremes and previous value, per phase (0: +beta, 1: -beta).
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> ext[2] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    std::vector<double> prev[2] = {std::vector<double>(n, inf), std::vector<double>(n, inf)};
    std::vector<double> lo(n, inf), hi(n, -inf);
    double max_change = 0.0;

    auto record = [&](int phase, int i, double l10) {
      if (std::abs(l10) > std::abs(ext[phase][i])) ext[phase][i] = l10;
      if (std::isfinite(prev[phase][i])) max_change = std::max(max_change, std::abs(l10 - prev[phase][i]));
      prev[phase][i] = l10;
      lo[i] = std::min(lo[i], l10);
      hi[i] = std::max(hi[i], l10);
    };

    rl::NudgeObserver observer = [&](double beta, int, const VectorD& log_r, const std::vector<std::uint8_t>&) {
      const int phase = beta > 0 ? 0 : 1;
      for (int i = 0; i < n; ++i) record(phase, i, log_r(i) * kLog10E);
    };

    eqprop::ThreePhaseConfig tc = cfg.phases;
    tc.beta_ep = cfg.beta;
    auto res = eqprop::three_phase(policy, input, rl::policy_loss(batch, clip, 1.0, observer), tc);

    auto final_log10 = [&](const eqprop::RelaxationState<float>& st) {
      return VectorD(rl::log_nudging_ratio(st.output().cast<double>(), batch.actions, log_sigma,
                                           batch.log_prob_rollout) *
                     kLog10E);
    };
    const VectorD free_l10 = final_log10(res.free_state);
    const VectorD plus_l10 = final_log10(res.plus_state);
    const VectorD minus_l10 = final_log10(res.minus_state);
    for (int i = 0; i < n; ++i) {
      record(0, i, plus_l10(i));
      record(1, i, minus_l10(i));
    }

    NudgeReport rep;
    rep.eps_rev = eps_rev;
    rep.beta = cfg.beta;
    rep.max_step_change = max_change;
    rep.min_log10_r_pos_adv = inf;
    rep.max_log10_r_neg_adv = -inf;
    std::vector<Accumulator> acc_free(kAdvantageBins), acc_pos(kAdvantageBins), acc_neg(kAdvantageBins);
    for (int i = 0; i < n; ++i) {
      const double a = batch.advantages(i);
      const int b = advantage_bin(a);
      acc_free[b].xs.push_back(free_l10(i));
      acc_pos[b].xs.push_back(ext[0][i]);
      acc_neg[b].xs.push_back(ext[1][i]);
      if (a > 0) rep.min_log10_r_pos_adv = std::min(rep.min_log10_r_pos_adv, lo[i]);
      if (a < 0) rep.max_log10_r_neg_adv = std::max(rep.max_log10_r_neg_adv, hi[i]);
      if (a == 0)
        rep.max_drift_zero_adv =
            std::max({rep.max_drift_zero_adv, std::abs(lo[i] - free_l10(i)), std::abs(hi[i] - free_l10(i))});
    }
    const double width = 2.0 * kAdvantageRange / kAdvantageBins;
    for (int b = 0; b < kAdvantageBins; ++b) {
      NudgeBin bin;
      bin.lo = -kAdvantageRange + b * width;
      bin.hi = bin.lo + width;
      bin.free = acc_free[b].summary();
      bin.extreme_pos = acc_pos[b].summary();
      bin.extreme_neg = acc_neg[b].summary();
      rep.bins.push_back(bin);
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_nudge_csv(std::ostream& out, const std::vector<NudgeReport>& reports) {
  out << "eps_rev,beta,bin_lo,bin_hi,count,free_mean,free_std,pos_extreme_mean,pos_extreme_std,"
         "neg_extreme_mean,neg_extreme_std\n";
  for (const auto& r : reports) {
    for (const auto& b : r.bins) {
      out << r.eps_rev << ',' << r.beta << ',' << b.lo << ',' << b.hi << ',' << b.free.count << ',' << b.free.mean
          << ',' << b.free.std << ',' << b.extreme_pos.mean << ',' << b.extreme_pos.std << ',' << b.extreme_neg.mean
          << ',' << b.extreme_neg.std << '\n';
    }
  }
}

}  // namespace eqppo::harness
