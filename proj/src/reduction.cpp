#include "pmbm/reduction.hpp"

#include "pmbm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pmbm {

namespace {

double binary_kld(double r1, double r2) {
    auto term = [](double p, double q) {
        if (p <= 0.0) return 0.0;
        if (q <= 0.0) return std::numeric_limits<double>::infinity();
        return p * std::log(p / q);
    };
    return term(r1, r2) + term(1.0 - r1, 1.0 - r2);
}

}  // namespace

ReductionReport prune_hypotheses(PMBMDensity& density, double min_logw, size_t cap) {
    ReductionReport report;
    auto& hyps = density.hypotheses;
    std::sort(hyps.begin(), hyps.end(), [](const GlobalHypothesis& a, const GlobalHypothesis& b) {
        return a.log_w > b.log_w;
    });
    size_t keep = hyps.size();
    while (keep > 1 && (hyps[keep - 1].log_w < min_logw || keep > cap)) --keep;

    double removed = 0.0;
    for (size_t j = keep; j < hyps.size(); ++j) removed += std::exp(hyps[j].log_w);
    hyps.resize(keep);
    density.normalize();

    report.pruned_mass = removed;
    report.l1_bound = 2.0 * removed;
    return report;
}

ReductionReport recycle(PMBMDensity& density, double tau_rec) {
    ReductionReport report;
    for (auto& hyp : density.hypotheses) {
        std::vector<BernoulliTrack> kept;
        for (auto& track : hyp.tracks) {
            if (track.r < tau_rec) {
                if (track.r > 0.0) {
                    // Recycled intensity r f(x), weighted by the hypothesis
                    // the Bernoulli came from so the mixture-wide expected
                    // cardinality is what moves into the PPP.
                    const double log_r = std::log(track.r) + hyp.log_w;
                    for (const auto& comp : track.state) {
                        density.ppp.components.push_back({log_r + comp.log_w, comp.params});
                    }
                }
                ++report.recycled_count;
            } else {
                kept.push_back(std::move(track));
            }
        }
        hyp.tracks = std::move(kept);
    }
    return report;
}

double mb_divergence_bound(const GlobalHypothesis& a, const GlobalHypothesis& b) {
    if (a.tracks.size() != b.tracks.size()) {
        return std::numeric_limits<double>::infinity();
    }
    const size_t n = a.tracks.size();
    if (n == 0) return 0.0;
    std::vector<std::vector<double>> costs(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            costs[i][j] = binary_kld(a.tracks[i].r, b.tracks[j].r) +
                          a.tracks[i].r * ggiw_kld(a.tracks[i].mode(), b.tracks[j].mode());
        }
    }
    try {
        return hungarian(costs).total_cost;
    } catch (const Infeasible&) {
        return std::numeric_limits<double>::infinity();
    }
}

ReductionReport merge_hypotheses(PMBMDensity& density, double merge_thresh) {
    ReductionReport report;
    auto& hyps = density.hypotheses;
    std::sort(hyps.begin(), hyps.end(), [](const GlobalHypothesis& a, const GlobalHypothesis& b) {
        return a.log_w > b.log_w;
    });
    std::vector<bool> absorbed(hyps.size(), false);
    for (size_t i = 0; i < hyps.size(); ++i) {
        if (absorbed[i]) continue;
        for (size_t j = i + 1; j < hyps.size(); ++j) {
            if (absorbed[j]) continue;
            if (hyps[i].tracks.size() != hyps[j].tracks.size()) continue;
            if (mb_divergence_bound(hyps[i], hyps[j]) < merge_thresh) {
                hyps[i].log_w = math::log_sum_exp({hyps[i].log_w, hyps[j].log_w});
                absorbed[j] = true;
                ++report.merged_pairs;
            }
        }
    }
    std::vector<GlobalHypothesis> kept;
    for (size_t i = 0; i < hyps.size(); ++i) {
        if (!absorbed[i]) kept.push_back(std::move(hyps[i]));
    }
    hyps = std::move(kept);
    density.normalize();
    return report;
}

MixtureReduceResult reduce_ppp(PPPIntensity& ppp, double prune_logw, double merge_thresh,
                               size_t cap) {
    MixtureReduceResult result =
        ggiw_mixture_reduce(ppp.components, merge_thresh, prune_logw, cap);
    ppp.components = result.components;
    return result;
}

ReductionReport reduce(PMBMDensity& density, const ReductionConfig& config) {
    ReductionReport report = prune_hypotheses(density, std::log(config.prune_w), config.cap);
    const ReductionReport rec = recycle(density, config.tau_rec);
    report.recycled_count = rec.recycled_count;
    const ReductionReport merged = merge_hypotheses(density, config.merge_dub);
    report.merged_pairs = merged.merged_pairs;
    reduce_ppp(density.ppp, config.ppp_prune_logw, config.ppp_merge_thresh, config.ppp_cap);
    return report;
}

}  // namespace pmbm
