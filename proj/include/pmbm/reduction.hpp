#pragma once

#include "pmbm/pmbm.hpp"

namespace pmbm {

struct ReductionReport {
    double pruned_mass = 0.0;   // normalized hypothesis mass removed
    double l1_bound = 0.0;      // 2 * pruned_mass
    int recycled_count = 0;
    int merged_pairs = 0;
};

struct ReductionConfig {
    double prune_w = 1e-4;    // minimum hypothesis weight
    size_t cap = 100;         // maximum hypothesis count
    double tau_rec = 0.1;     // Bernoulli recycling threshold on r
    double merge_dub = 0.1;   // hypothesis-merge divergence threshold
    double ppp_prune_logw = std::log(1e-5);
    double ppp_merge_thresh = 0.1;
    size_t ppp_cap = 50;
};

/// Drop hypotheses below min_logw, then the lightest until at most cap remain;
/// renormalize. The report carries the removed normalized mass and the L1
/// approximation bound 2 * pruned_mass.
ReductionReport prune_hypotheses(PMBMDensity& density, double min_logw, size_t cap);

/// Remove every Bernoulli with r < tau_rec from its hypothesis and add its
/// state to the PPP with mass r. Per source hypothesis, sum of r plus PPP mass
/// is preserved exactly.
ReductionReport recycle(PMBMDensity& density, double tau_rec);

/// Divergence upper bound between two multi-Bernoullis with equal track
/// counts: Hungarian-minimal sum of pairwise Bernoulli KLDs, where a Bernoulli
/// pair contributes the binary KLD of (r1, r2) plus r1 times the GGIW state
/// KLD.
double mb_divergence_bound(const GlobalHypothesis& a, const GlobalHypothesis& b);

/// Greedily merge hypothesis pairs (equal track counts, bound below
/// merge_thresh) in descending weight order; weights add and the heavier
/// member's parameters are kept.
ReductionReport merge_hypotheses(PMBMDensity& density, double merge_thresh);

/// PPP intensity reduction via ggiw_mixture_reduce.
MixtureReduceResult reduce_ppp(PPPIntensity& ppp, double prune_logw, double merge_thresh,
                               size_t cap);

/// The per-scan pipeline: prune -> recycle -> merge -> reduce PPP.
ReductionReport reduce(PMBMDensity& density, const ReductionConfig& config);

}  // namespace pmbm
