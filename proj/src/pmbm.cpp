#include "pmbm/pmbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace pmbm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kEnumerationGuard = 12;
}  // namespace

double PPPIntensity::total_mass() const {
    double mass = 0.0;
    for (const auto& c : components) mass += std::exp(c.log_w);
    return mass;
}

const GlobalHypothesis& PMBMDensity::best_hypothesis() const {
    const auto it = std::max_element(
        hypotheses.begin(), hypotheses.end(),
        [](const GlobalHypothesis& a, const GlobalHypothesis& b) { return a.log_w < b.log_w; });
    return *it;
}

double PMBMDensity::log_total_weight() const {
    std::vector<double> ws;
    ws.reserve(hypotheses.size());
    for (const auto& h : hypotheses) ws.push_back(h.log_w);
    return math::log_sum_exp(ws);
}

void PMBMDensity::normalize() {
    const double lse = log_total_weight();
    for (auto& h : hypotheses) h.log_w -= lse;
}

// ---- Prediction ----

PMBMDensity predict(const PMBMDensity& density, const MotionModel& motion,
                    const SensorModel& sensor, const PPPIntensity& birth) {
    PMBMDensity out;
    out.next_track_id = density.next_track_id;
    out.ppp.components = birth.components;
    for (const auto& c : density.ppp.components) {
        WeightedGGIW pred;
        pred.params = ggiw_predict(c.params, motion);
        pred.log_w = c.log_w + std::log(sensor.p_survive);
        out.ppp.components.push_back(std::move(pred));
    }
    out.hypotheses.clear();
    for (const auto& hyp : density.hypotheses) {
        GlobalHypothesis h;
        h.log_w = hyp.log_w;
        for (const auto& track : hyp.tracks) {
            BernoulliTrack t;
            t.id = track.id;
            t.r = sensor.p_survive * track.r;
            for (const auto& comp : track.state) {
                t.state.push_back({comp.log_w, ggiw_predict(comp.params, motion)});
            }
            h.tracks.push_back(std::move(t));
        }
        out.hypotheses.push_back(std::move(h));
    }
    return out;
}

// ---- PPP updates ----

PPPIntensity ppp_update_missed(const PPPIntensity& ppp, const SensorModel& sensor) {
    PPPIntensity out;
    for (const auto& c : ppp.components) {
        const double pd = sensor.pd_at(c.params.position());
        const auto f = neg_detection_factors(c.params, pd);
        WeightedGGIW reduced;
        reduced.log_w = c.log_w + std::log(f.qd);
        reduced.params = c.params;
        const auto [alpha, beta] = gamma_mixture_reduce(
            {{std::exp(f.log_w1), f.branch1.alpha, f.branch1.beta},
             {std::exp(f.log_w2), f.branch2.alpha, f.branch2.beta}});
        reduced.params.alpha = alpha;
        reduced.params.beta = beta;
        out.components.push_back(std::move(reduced));
    }
    return out;
}

namespace {

/// Normalize a weighted mixture and reduce it to a single component.
std::vector<WeightedGGIW> reduce_to_single(std::vector<WeightedGGIW> mix) {
    std::vector<double> ws;
    for (const auto& c : mix) ws.push_back(c.log_w);
    const double lse = math::log_sum_exp(ws);
    for (auto& c : mix) c.log_w -= lse;
    auto res = ggiw_mixture_reduce(std::move(mix), 0.0, kNegInf, 1);
    res.components.front().log_w = 0.0;
    return std::move(res.components);
}

}  // namespace

std::pair<BernoulliTrack, double> ppp_detect_new(const PPPIntensity& ppp,
                                                 const MeasurementSet& cell,
                                                 const SensorModel& sensor) {
    if (cell.empty()) throw EmptyCell();
    // Cheap prefilter: components whose single-measurement gate distance is
    // hopeless contribute nothing at double precision; skip the full
    // conjugate update for them but always keep the closest component.
    std::vector<double> dist_sq(ppp.components.size(),
                                std::numeric_limits<double>::infinity());
    double min_dist_sq = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ppp.components.size(); ++i) {
        const auto& z = ppp.components[i].params;
        const Mat2 s = math::symmetrize(sensor.H * z.P * sensor.H.transpose() +
                                        z.mean_extent());
        dist_sq[i] = math::mahalanobis_sq(s, cell.front() - sensor.H * z.m);
        min_dist_sq = std::min(min_dist_sq, dist_sq[i]);
    }
    constexpr double kPrefilterSlack = 200.0;  // ~e^-100 relative contribution

    std::vector<WeightedGGIW> mix;
    std::vector<double> terms;
    for (size_t i = 0; i < ppp.components.size(); ++i) {
        const auto& c = ppp.components[i];
        if (dist_sq[i] > min_dist_sq + kPrefilterSlack) continue;
        const double pd = sensor.pd_at(c.params.position());
        if (pd <= 0.0) continue;
        const auto [upd, ll] = ggiw_update(c.params, cell, sensor.H);
        const double log_term = c.log_w + std::log(pd) + ll;
        mix.push_back({log_term, upd});
        terms.push_back(log_term);
    }
    const double log_sum = math::log_sum_exp(terms);

    BernoulliTrack track;
    double log_l;
    if (cell.size() == 1) {
        log_l = math::log_sum_exp({sensor.log_clutter_intensity(), log_sum});
        track.r = std::isfinite(log_sum) ? std::exp(log_sum - log_l) : 0.0;
    } else {
        log_l = log_sum;
        track.r = 1.0;
    }
    if (mix.empty()) {
        // no undetected intensity covers the cell; keep a placeholder state
        GGIWParams z;
        z.m.head<2>() = cell.front();
        track.state = {{0.0, z}};
    } else {
        track.state = reduce_to_single(std::move(mix));
    }
    return {std::move(track), log_l};
}

// ---- Bernoulli updates ----

std::pair<BernoulliTrack, double> bernoulli_detect(const BernoulliTrack& track,
                                                   const MeasurementSet& cell,
                                                   const SensorModel& sensor) {
    if (cell.empty()) throw EmptyCell();
    std::vector<WeightedGGIW> mix;
    std::vector<double> terms;
    double pd_mode = 0.0;
    for (const auto& c : track.state) {
        const double pd = sensor.pd_at(c.params.position());
        if (&c == &track.state.front()) pd_mode = pd;
        const auto [upd, ll] = ggiw_update(c.params, cell, sensor.H);
        mix.push_back({c.log_w + ll, upd});
        terms.push_back(c.log_w + ll);
    }
    const double log_ell = math::log_sum_exp(terms);

    BernoulliTrack out;
    out.id = track.id;
    out.r = 1.0;
    out.state = reduce_to_single(std::move(mix));
    const double log_l =
        (track.r > 0.0 && pd_mode > 0.0)
            ? std::log(track.r) + std::log(pd_mode) + log_ell
            : kNegInf;
    return {std::move(out), log_l};
}

std::pair<BernoulliTrack, double> bernoulli_missed(const BernoulliTrack& track,
                                                   const SensorModel& sensor) {
    BernoulliTrack out;
    out.id = track.id;
    double qd_total = 0.0;
    for (const auto& c : track.state) {
        const double pd = sensor.pd_at(c.params.position());
        const auto f = neg_detection_factors(c.params, pd);
        qd_total += std::exp(c.log_w) * f.qd;
        WeightedGGIW reduced;
        reduced.log_w = c.log_w;
        reduced.params = c.params;
        const auto [alpha, beta] = gamma_mixture_reduce(
            {{std::exp(f.log_w1), f.branch1.alpha, f.branch1.beta},
             {std::exp(f.log_w2), f.branch2.alpha, f.branch2.beta}});
        reduced.params.alpha = alpha;
        reduced.params.beta = beta;
        out.state.push_back(std::move(reduced));
    }
    const double lik = 1.0 - track.r + track.r * qd_total;
    out.r = lik > 0.0 ? track.r * qd_total / lik : 0.0;
    return {std::move(out), std::log(lik)};
}

// ---- Update ----

PMBMDensity update(const PMBMDensity& density, const MeasurementSet& scan,
                   const SensorModel& sensor, const AssociationProvider& provider) {
    PMBMDensity out;
    out.next_track_id = density.next_track_id;
    out.ppp = ppp_update_missed(density.ppp, sensor);
    out.hypotheses.clear();

    // Identical cells recur across associations (and, for new tracks, across
    // parent hypotheses); cache the conjugate updates.
    std::map<std::vector<int>, std::pair<BernoulliTrack, double>> new_cache;
    for (const auto& hyp : density.hypotheses) {
        const auto associations = provider(hyp, density.ppp, scan, sensor);
        if (associations.empty()) throw NoAssociations();
        std::map<std::pair<int, std::vector<int>>, std::pair<BernoulliTrack, double>>
            detect_cache;
        std::vector<std::optional<std::pair<BernoulliTrack, double>>> missed_cache(
            hyp.tracks.size());
        auto missed = [&](size_t i) -> const std::pair<BernoulliTrack, double>& {
            if (!missed_cache[i]) missed_cache[i] = bernoulli_missed(hyp.tracks[i], sensor);
            return *missed_cache[i];
        };
        for (const auto& assoc : associations) {
            GlobalHypothesis child;
            child.log_w = hyp.log_w;
            std::vector<bool> handled(hyp.tracks.size(), false);
            for (const auto& cell : assoc.cells) {
                std::vector<int> key = cell.measurements;
                std::sort(key.begin(), key.end());
                MeasurementSet meas;
                meas.reserve(key.size());
                for (int m : key) meas.push_back(scan[m]);
                if (cell.track.has_value()) {
                    const size_t idx = static_cast<size_t>(*cell.track);
                    handled[idx] = true;
                    if (meas.empty()) {
                        const auto& [t, log_l] = missed(idx);
                        child.log_w += log_l;
                        child.tracks.push_back(t);
                    } else {
                        auto it = detect_cache.find({*cell.track, key});
                        if (it == detect_cache.end()) {
                            it = detect_cache
                                     .emplace(std::make_pair(*cell.track, key),
                                              bernoulli_detect(hyp.tracks[idx], meas, sensor))
                                     .first;
                        }
                        child.log_w += it->second.second;
                        child.tracks.push_back(it->second.first);
                    }
                } else {
                    auto it = new_cache.find(key);
                    if (it == new_cache.end()) {
                        it = new_cache.emplace(key, ppp_detect_new(density.ppp, meas, sensor))
                                 .first;
                    }
                    BernoulliTrack t = it->second.first;
                    t.id = out.next_track_id++;
                    child.log_w += it->second.second;
                    child.tracks.push_back(std::move(t));
                }
            }
            for (size_t i = 0; i < hyp.tracks.size(); ++i) {
                if (handled[i]) continue;
                const auto& [t, log_l] = missed(i);
                child.log_w += log_l;
                child.tracks.push_back(t);
            }
            out.hypotheses.push_back(std::move(child));
        }
    }
    out.normalize();
    return out;
}

// ---- Exhaustive association enumeration ----

std::vector<Association> enumerate_all_associations(int n_meas,
                                                    const std::vector<int>& track_indices) {
    const int n_items = n_meas + static_cast<int>(track_indices.size());
    if (n_items > kEnumerationGuard) throw TooLarge();

    // items 0..n_meas-1 are measurements, the rest are tracks
    std::vector<Association> out;
    Association current;
    auto track_of_item = [&](int item) -> std::optional<int> {
        if (item < n_meas) return std::nullopt;
        return track_indices[static_cast<size_t>(item - n_meas)];
    };

    std::function<void(int)> recurse = [&](int item) {
        if (item == n_items) {
            out.push_back(current);
            return;
        }
        const auto track = track_of_item(item);
        const size_t n_cells = current.cells.size();
        for (size_t ci = 0; ci < n_cells; ++ci) {
            auto& cell = current.cells[ci];
            if (track.has_value() && cell.track.has_value()) continue;
            if (track.has_value()) {
                cell.track = track;
                recurse(item + 1);
                current.cells[ci].track = std::nullopt;
            } else {
                cell.measurements.push_back(item);
                recurse(item + 1);
                current.cells[ci].measurements.pop_back();
            }
        }
        AssociationCell fresh;
        if (track.has_value()) {
            fresh.track = track;
        } else {
            fresh.measurements.push_back(item);
        }
        current.cells.push_back(std::move(fresh));
        recurse(item + 1);
        current.cells.pop_back();
    };
    recurse(0);
    return out;
}

AssociationProvider exhaustive_provider() {
    return [](const GlobalHypothesis& hyp, const PPPIntensity&, const MeasurementSet& scan,
              const SensorModel&) {
        std::vector<int> track_indices(hyp.tracks.size());
        for (size_t i = 0; i < track_indices.size(); ++i) track_indices[i] = static_cast<int>(i);
        return enumerate_all_associations(static_cast<int>(scan.size()), track_indices);
    };
}

// ---- Estimate extraction ----

std::vector<Estimate> extract_estimate(const PMBMDensity& density) {
    std::vector<Estimate> out;
    for (const auto& track : density.best_hypothesis().tracks) {
        if (track.r <= 0.5) continue;
        const GGIWParams& z = track.mode();
        out.push_back({z.m, z.mean_extent(), z.mean_rate(), track.id, track.r});
    }
    return out;
}

}  // namespace pmbm
