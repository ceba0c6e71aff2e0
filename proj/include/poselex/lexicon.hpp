#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace poselex {

/// An ordered, finite set of linguistic terms. Immutable after construction.
class Lexicon {
public:
    Lexicon(std::string name, std::vector<std::string> terms);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    const std::string& term(std::size_t i) const { return terms_.at(i); }

    std::optional<std::size_t> find(std::string_view term) const;
    /// Like find(), but throws std::invalid_argument when the term is unknown.
    std::size_t index_of(std::string_view term) const;

    /// Two lexicons are interchangeable when their term lists match; the name
    /// is a label only.
    friend bool operator==(const Lexicon& a, const Lexicon& b) {
        return a.terms_ == b.terms_;
    }

private:
    std::string name_;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::size_t> index_;
};

using LexiconPtr = std::shared_ptr<const Lexicon>;

LexiconPtr make_lexicon(std::string name, std::vector<std::string> terms);

bool same_lexicon(const LexiconPtr& a, const LexiconPtr& b);

/// Unit-mass distribution over a lexicon's terms. Masses are nonnegative and
/// renormalized to sum exactly 1 on construction (input sum must be positive
/// and within 1e-9 of the stored sum only after normalization).
class MassVector {
public:
    MassVector(LexiconPtr lexicon, std::vector<double> masses);

    static MassVector singleton(LexiconPtr lexicon, std::size_t index);
    static MassVector singleton(LexiconPtr lexicon, std::string_view term);

    const LexiconPtr& lexicon() const { return lexicon_; }
    const std::vector<double>& masses() const { return masses_; }
    double at(std::size_t i) const { return masses_.at(i); }
    double at(std::string_view term) const;
    std::size_t size() const { return masses_.size(); }

    /// Index of the single term carrying all mass, or nullopt.
    std::optional<std::size_t> singleton_index(double tol = 1e-12) const;

private:
    LexiconPtr lexicon_;
    std::vector<double> masses_;
};

MassVector make_mass_vector(LexiconPtr lexicon, std::vector<double> masses);

double l1_distance(const MassVector& a, const MassVector& b);

/// Triangular Ruspini partition of a scalar angle domain. Each term owns one
/// modal angle; membership is linear between consecutive modal angles, so an
/// input exactly at a modal angle fuzzifies to a singleton. Terms must be
/// listed in strictly increasing modal-angle order. Circular partitions wrap
/// the domain at +/-180 degrees.
class FuzzyPartition {
public:
    FuzzyPartition(LexiconPtr lexicon, std::vector<double> modal_angles_deg,
                   bool circular);

    const LexiconPtr& lexicon() const { return lexicon_; }
    const std::vector<double>& modal_angles() const { return modal_angles_; }
    bool circular() const { return circular_; }

    MassVector fuzzify(double angle_deg) const;

private:
    LexiconPtr lexicon_;
    std::vector<double> modal_angles_;
    bool circular_;
};

/// Out-of-range angles on non-circular partitions clamp to the nearest end
/// term; circular partitions interpolate across the wrap.
MassVector fuzzify_angle(double angle_deg, const FuzzyPartition& partition);

// Built-in posture vocabularies.

/// {down, front, up, outside, rear, inside}
LexiconPtr arm_lexicon();
/// {open, close, hmiddle, vmiddle}
LexiconPtr forearm_lexicon();
/// The 24 modal-posture terms: one per (arm, forearm) combination.
LexiconPtr modal_posture_lexicon();

/// Modal term named by an (arm term, forearm term) combination, e.g.
/// ("front", "close") -> "frontfolded", ("up", "open") -> "up".
std::string modal_term(std::string_view arm_term, std::string_view forearm_term);

struct ModalComponents {
    std::size_t arm;      // index into arm_lexicon()
    std::size_t forearm;  // index into forearm_lexicon()
};

/// Decompose a modal-posture term index into its arm and forearm components.
ModalComponents modal_components(std::size_t modal_index);

}  // namespace poselex
