#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poselex/posture.hpp"
#include "poselex/transport.hpp"

namespace poselex {

enum class Strategy {
    nearest,             // closest reference wins
    tolerance_strict,    // disjoint tolerance balls; empty result allowed
    tolerance_overlap,   // overlapping balls allowed; multi-match is a partial decision
    emergency_priority,  // in-tolerance emergency references override everything
};
// tolerance_strict assumes the caller rejected overlapping volumes up front
// (see validate_tolerances); if it is fed an unvalidated overlapping setup and
// several volumes contain the measurement, the result degrades to the same
// action-less partial decision tolerance_overlap would give.

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

enum class TieBreak { lexicographic };

std::string_view to_string(TieBreak t);
TieBreak tie_break_from_string(std::string_view s);

struct DecisionConfig {
    Strategy strategy = Strategy::nearest;
    TieBreak tie_break = TieBreak::lexicographic;
    /// Optional cap for the nearest strategy: a nearest reference farther than
    /// this is not recognized. Disabled by default.
    std::optional<double> max_distance;
};

/// Which situation produced the outcome.
enum class DecisionCase {
    closest,             // nearest reference selected
    no_match,            // nothing within tolerance (or past the nearest cap)
    single_match,        // exactly one tolerance volume contains the measurement
    partial_overlap,     // several volumes contain it; the set is the decision
    emergency_override,  // an in-tolerance emergency reference took priority
};

std::string_view to_string(DecisionCase c);

struct DecisionOutcome {
    /// Recognized reference names, nearest first (ties broken by name).
    std::vector<std::string> recognized;
    /// Action to execute; absent when nothing is recognized and under
    /// tolerance_overlap when the recognized set is not a singleton.
    std::optional<std::string> chosen_action;
    std::map<std::string, double> distances;
    DecisionCase rationale = DecisionCase::no_match;
};

/// Apply a strategy to precomputed distances.
DecisionOutcome decide_from_distances(const std::map<std::string, double>& distances,
                                      const std::vector<ReferencePosture>& refs,
                                      const DecisionConfig& config);

/// Compute transport distances from the measured posture to every reference,
/// then decide.
DecisionOutcome decide(const MassVector& measured,
                       const std::vector<ReferencePosture>& refs,
                       const GroundDistance& ground, const DecisionConfig& config);

enum class ToleranceMode { strict, overlap };

struct OverlapPair {
    std::string first, second;
    double distance;  // transport distance between the two reference LFSs
};

/// Every reference pair whose tolerance balls overlap (inter-distance smaller
/// than the tolerance sum). In strict mode a non-empty result means the
/// configuration is invalid; in overlap mode it is informational.
std::vector<OverlapPair> validate_tolerances(const std::vector<ReferencePosture>& refs,
                                             const GroundDistance& ground,
                                             ToleranceMode mode);

}  // namespace poselex
