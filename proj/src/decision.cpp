#include "poselex/decision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace poselex {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::nearest: return "nearest";
        case Strategy::tolerance_strict: return "tolerance_strict";
        case Strategy::tolerance_overlap: return "tolerance_overlap";
        case Strategy::emergency_priority: return "emergency_priority";
    }
    return "nearest";
}

Strategy strategy_from_string(std::string_view s) {
    if (s == "nearest") return Strategy::nearest;
    if (s == "tolerance_strict") return Strategy::tolerance_strict;
    if (s == "tolerance_overlap") return Strategy::tolerance_overlap;
    if (s == "emergency_priority") return Strategy::emergency_priority;
    throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

std::string_view to_string(TieBreak t) {
    (void)t;
    return "lexicographic";
}

TieBreak tie_break_from_string(std::string_view s) {
    if (s == "lexicographic") return TieBreak::lexicographic;
    throw std::invalid_argument("unknown tie break '" + std::string(s) + "'");
}

std::string_view to_string(DecisionCase c) {
    switch (c) {
        case DecisionCase::closest: return "closest";
        case DecisionCase::no_match: return "no_match";
        case DecisionCase::single_match: return "single_match";
        case DecisionCase::partial_overlap: return "partial_overlap";
        case DecisionCase::emergency_override: return "emergency_override";
    }
    return "no_match";
}

namespace {

double distance_of(const std::map<std::string, double>& distances,
                   const ReferencePosture& ref) {
    auto it = distances.find(ref.name);
    if (it == distances.end()) {
        throw std::invalid_argument("no distance supplied for reference '" + ref.name +
                                    "'");
    }
    if (!(it->second >= 0.0)) {
        throw std::invalid_argument("distance for reference '" + ref.name +
                                    "' is negative or non-finite");
    }
    return it->second;
}

// nearest first, ties by name (the one deterministic tie break).
void sort_by_distance(std::vector<const ReferencePosture*>& refs,
                      const std::map<std::string, double>& distances) {
    std::sort(refs.begin(), refs.end(),
              [&](const ReferencePosture* a, const ReferencePosture* b) {
                  double da = distances.at(a->name);
                  double db = distances.at(b->name);
                  if (da != db) return da < db;
                  return a->name < b->name;
              });
}

std::vector<const ReferencePosture*> within_tolerance(
    const std::vector<ReferencePosture>& refs,
    const std::map<std::string, double>& distances, bool emergency_only,
    bool classical_only) {
    std::vector<const ReferencePosture*> hits;
    for (const ReferencePosture& ref : refs) {
        if (emergency_only && ref.action_class != ActionClass::emergency) continue;
        if (classical_only && ref.action_class != ActionClass::classical) continue;
        if (distance_of(distances, ref) <= ref.tolerance) {
            hits.push_back(&ref);
        }
    }
    return hits;
}

DecisionOutcome from_hits(std::vector<const ReferencePosture*> hits,
                          const std::map<std::string, double>& distances,
                          DecisionCase when_single) {
    DecisionOutcome out;
    out.distances = distances;
    if (hits.empty()) {
        out.rationale = DecisionCase::no_match;
        return out;
    }
    sort_by_distance(hits, distances);
    for (const ReferencePosture* r : hits) out.recognized.push_back(r->name);
    if (hits.size() == 1) {
        out.chosen_action = hits.front()->action_id;
        out.rationale = when_single;
    } else {
        out.rationale = DecisionCase::partial_overlap;  // partial decision, no action
    }
    return out;
}

}  // namespace

DecisionOutcome decide_from_distances(const std::map<std::string, double>& distances,
                                      const std::vector<ReferencePosture>& refs,
                                      const DecisionConfig& config) {
    if (refs.empty()) {
        throw std::invalid_argument("cannot decide against an empty reference set");
    }
    for (const ReferencePosture& ref : refs) distance_of(distances, ref);

    switch (config.strategy) {
        case Strategy::nearest: {
            std::vector<const ReferencePosture*> all;
            for (const ReferencePosture& ref : refs) all.push_back(&ref);
            sort_by_distance(all, distances);
            const ReferencePosture* best = all.front();
            DecisionOutcome out;
            out.distances = distances;
            if (config.max_distance &&
                distances.at(best->name) > *config.max_distance) {
                out.rationale = DecisionCase::no_match;
                return out;
            }
            out.recognized = {best->name};
            out.chosen_action = best->action_id;
            out.rationale = DecisionCase::closest;
            return out;
        }
        case Strategy::tolerance_strict: {
            // With disjoint tolerance volumes (enforced at configuration time)
            // this set has at most one element.
            auto hits = within_tolerance(refs, distances, false, false);
            return from_hits(std::move(hits), distances, DecisionCase::single_match);
        }
        case Strategy::tolerance_overlap: {
            auto hits = within_tolerance(refs, distances, false, false);
            return from_hits(std::move(hits), distances, DecisionCase::single_match);
        }
        case Strategy::emergency_priority: {
            auto emergencies = within_tolerance(refs, distances, true, false);
            if (!emergencies.empty()) {
                sort_by_distance(emergencies, distances);
                DecisionOutcome out;
                out.distances = distances;
                out.recognized = {emergencies.front()->name};
                out.chosen_action = emergencies.front()->action_id;
                out.rationale = DecisionCase::emergency_override;
                return out;
            }
            auto hits = within_tolerance(refs, distances, false, true);
            return from_hits(std::move(hits), distances, DecisionCase::single_match);
        }
    }
    throw std::logic_error("unhandled strategy");
}

DecisionOutcome decide(const MassVector& measured,
                       const std::vector<ReferencePosture>& refs,
                       const GroundDistance& ground, const DecisionConfig& config) {
    if (refs.empty()) {
        throw std::invalid_argument("cannot decide against an empty reference set");
    }
    std::map<std::string, double> distances;
    for (const ReferencePosture& ref : refs) {
        distances[ref.name] = transport_distance(measured, ref.lfs, ground);
    }
    return decide_from_distances(distances, refs, config);
}

std::vector<OverlapPair> validate_tolerances(const std::vector<ReferencePosture>& refs,
                                             const GroundDistance& ground,
                                             ToleranceMode mode) {
    (void)mode;  // same scan either way; the caller decides severity
    std::vector<OverlapPair> overlaps;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        for (std::size_t j = i + 1; j < refs.size(); ++j) {
            double d = transport_distance(refs[i].lfs, refs[j].lfs, ground);
            if (d < refs[i].tolerance + refs[j].tolerance) {
                overlaps.push_back(OverlapPair{refs[i].name, refs[j].name, d});
            }
        }
    }
    return overlaps;
}

}  // namespace poselex
