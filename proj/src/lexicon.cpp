#include "poselex/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace poselex {

namespace {

constexpr double kUnitSumTolerance = 1e-9;

double wrap_degrees(double angle) {
    // Map into [-180, 180).
    double a = std::fmod(angle + 180.0, 360.0);
    if (a < 0.0) a += 360.0;
    return a - 180.0;
}

}  // namespace

Lexicon::Lexicon(std::string name, std::vector<std::string> terms)
    : name_(std::move(name)), terms_(std::move(terms)) {
    if (terms_.empty()) {
        throw std::invalid_argument("lexicon '" + name_ + "' has no terms");
    }
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].empty()) {
            throw std::invalid_argument("lexicon '" + name_ + "' has an empty term");
        }
        auto [it, inserted] = index_.emplace(terms_[i], i);
        (void)it;
        if (!inserted) {
            throw std::invalid_argument("lexicon '" + name_ + "' repeats term '" +
                                        terms_[i] + "'");
        }
    }
}

std::optional<std::size_t> Lexicon::find(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Lexicon::index_of(std::string_view term) const {
    auto idx = find(term);
    if (!idx) {
        throw std::invalid_argument("term '" + std::string(term) +
                                    "' not in lexicon '" + name_ + "'");
    }
    return *idx;
}

LexiconPtr make_lexicon(std::string name, std::vector<std::string> terms) {
    return std::make_shared<const Lexicon>(std::move(name), std::move(terms));
}

bool same_lexicon(const LexiconPtr& a, const LexiconPtr& b) {
    if (!a || !b) return false;
    return a == b || *a == *b;
}

MassVector::MassVector(LexiconPtr lexicon, std::vector<double> masses)
    : lexicon_(std::move(lexicon)), masses_(std::move(masses)) {
    if (!lexicon_) throw std::invalid_argument("mass vector needs a lexicon");
    if (masses_.size() != lexicon_->size()) {
        throw std::invalid_argument("mass vector has " +
                                    std::to_string(masses_.size()) +
                                    " entries for lexicon '" + lexicon_->name() +
                                    "' of size " + std::to_string(lexicon_->size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        double m = masses_[i];
        if (!std::isfinite(m) || m < 0.0) {
            throw std::invalid_argument("negative or non-finite mass on term '" +
                                        lexicon_->term(i) + "'");
        }
        sum += m;
    }
    if (sum <= 0.0) {
        throw std::invalid_argument("mass vector on lexicon '" + lexicon_->name() +
                                    "' has zero total mass");
    }
    // Renormalize exactly so chained combinations cannot drift.
    if (sum != 1.0) {
        for (double& m : masses_) m /= sum;
    }
    double check = std::accumulate(masses_.begin(), masses_.end(), 0.0);
    if (std::abs(check - 1.0) > kUnitSumTolerance) {
        throw std::invalid_argument("mass normalization failed");
    }
}

MassVector MassVector::singleton(LexiconPtr lexicon, std::size_t index) {
    if (!lexicon) throw std::invalid_argument("mass vector needs a lexicon");
    if (index >= lexicon->size()) {
        throw std::invalid_argument("singleton index out of range");
    }
    std::vector<double> masses(lexicon->size(), 0.0);
    masses[index] = 1.0;
    return MassVector(std::move(lexicon), std::move(masses));
}

MassVector MassVector::singleton(LexiconPtr lexicon, std::string_view term) {
    if (!lexicon) throw std::invalid_argument("mass vector needs a lexicon");
    std::size_t index = lexicon->index_of(term);
    return singleton(std::move(lexicon), index);
}

double MassVector::at(std::string_view term) const {
    return masses_[lexicon_->index_of(term)];
}

std::optional<std::size_t> MassVector::singleton_index(double tol) const {
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        if (masses_[i] >= 1.0 - tol) return i;
    }
    return std::nullopt;
}

MassVector make_mass_vector(LexiconPtr lexicon, std::vector<double> masses) {
    return MassVector(std::move(lexicon), std::move(masses));
}

double l1_distance(const MassVector& a, const MassVector& b) {
    if (!same_lexicon(a.lexicon(), b.lexicon())) {
        throw std::invalid_argument("mass vectors live on different lexicons");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += std::abs(a.masses()[i] - b.masses()[i]);
    }
    return d;
}

FuzzyPartition::FuzzyPartition(LexiconPtr lexicon,
                               std::vector<double> modal_angles_deg,
                               bool circular)
    : lexicon_(std::move(lexicon)),
      modal_angles_(std::move(modal_angles_deg)),
      circular_(circular) {
    if (!lexicon_) throw std::invalid_argument("partition needs a lexicon");
    if (modal_angles_.size() != lexicon_->size()) {
        throw std::invalid_argument("partition needs one modal angle per term");
    }
    for (std::size_t i = 0; i < modal_angles_.size(); ++i) {
        if (!std::isfinite(modal_angles_[i])) {
            throw std::invalid_argument("modal angle for '" + lexicon_->term(i) +
                                        "' is not finite");
        }
        if (i > 0 && modal_angles_[i] <= modal_angles_[i - 1]) {
            throw std::invalid_argument(
                "modal angles must be strictly increasing in term order");
        }
    }
    if (circular_) {
        double span = modal_angles_.back() - modal_angles_.front();
        if (span >= 360.0) {
            throw std::invalid_argument("circular partition spans 360 degrees or more");
        }
    }
}

MassVector FuzzyPartition::fuzzify(double angle_deg) const {
    if (!std::isfinite(angle_deg)) {
        throw std::invalid_argument("cannot fuzzify a non-finite angle");
    }
    const std::size_t n = lexicon_->size();
    std::vector<double> masses(n, 0.0);

    if (n == 1) {
        masses[0] = 1.0;
        return MassVector(lexicon_, std::move(masses));
    }

    double a = angle_deg;
    if (circular_) {
        a = wrap_degrees(a);
        if (a < modal_angles_.front()) a += 360.0;
        // a now lies in [first, first + 360).
        if (a >= modal_angles_.back()) {
            // Wrap segment from the last modal angle back to the first.
            double lo = modal_angles_.back();
            double hi = modal_angles_.front() + 360.0;
            double t = (a - lo) / (hi - lo);
            masses[n - 1] = 1.0 - t;
            masses[0] += t;
            return MassVector(lexicon_, std::move(masses));
        }
    } else {
        if (a <= modal_angles_.front()) {
            masses[0] = 1.0;
            return MassVector(lexicon_, std::move(masses));
        }
        if (a >= modal_angles_.back()) {
            masses[n - 1] = 1.0;
            return MassVector(lexicon_, std::move(masses));
        }
    }

    // a now lies in [first, last), so the segment index is in [1, n-1]
    auto hi_it = std::upper_bound(modal_angles_.begin(), modal_angles_.end(), a);
    std::size_t hi = static_cast<std::size_t>(hi_it - modal_angles_.begin());
    std::size_t lo = hi - 1;
    double t = (a - modal_angles_[lo]) / (modal_angles_[hi] - modal_angles_[lo]);
    masses[lo] = 1.0 - t;
    masses[hi] += t;
    return MassVector(lexicon_, std::move(masses));
}

MassVector fuzzify_angle(double angle_deg, const FuzzyPartition& partition) {
    return partition.fuzzify(angle_deg);
}

namespace {

// The arm lexicon lists pole terms before the azimuth ring; the modal
// vocabulary enumerates arm terms front-first inside each forearm block.
const std::vector<std::string> kArmTerms = {"down", "front",   "up",
                                            "outside", "rear", "inside"};
const std::vector<std::string> kForearmTerms = {"open", "close", "hmiddle",
                                                "vmiddle"};
const std::vector<std::string> kModalArmOrder = {"front", "outside", "inside",
                                                 "down",  "up",      "rear"};

std::string forearm_suffix(std::string_view forearm_term) {
    if (forearm_term == "open") return "";
    if (forearm_term == "close") return "folded";
    if (forearm_term == "hmiddle" || forearm_term == "vmiddle") {
        return std::string(forearm_term);
    }
    throw std::invalid_argument("unknown forearm term '" +
                                std::string(forearm_term) + "'");
}

}  // namespace

LexiconPtr arm_lexicon() {
    static const LexiconPtr lex = make_lexicon("arm", kArmTerms);
    return lex;
}

LexiconPtr forearm_lexicon() {
    static const LexiconPtr lex = make_lexicon("forearm", kForearmTerms);
    return lex;
}

std::string modal_term(std::string_view arm_term, std::string_view forearm_term) {
    if (std::find(kArmTerms.begin(), kArmTerms.end(), arm_term) == kArmTerms.end()) {
        throw std::invalid_argument("unknown arm term '" + std::string(arm_term) + "'");
    }
    return std::string(arm_term) + forearm_suffix(forearm_term);
}

LexiconPtr modal_posture_lexicon() {
    static const LexiconPtr lex = [] {
        std::vector<std::string> terms;
        terms.reserve(kForearmTerms.size() * kModalArmOrder.size());
        for (const auto& forearm : kForearmTerms) {
            for (const auto& arm : kModalArmOrder) {
                terms.push_back(modal_term(arm, forearm));
            }
        }
        return make_lexicon("modal_posture", std::move(terms));
    }();
    return lex;
}

ModalComponents modal_components(std::size_t modal_index) {
    const auto& modal = *modal_posture_lexicon();
    if (modal_index >= modal.size()) {
        throw std::invalid_argument("modal index out of range");
    }
    std::size_t block = modal_index / kModalArmOrder.size();
    std::size_t within = modal_index % kModalArmOrder.size();
    const std::string& arm_term = kModalArmOrder[within];
    return ModalComponents{arm_lexicon()->index_of(arm_term), block};
}

}  // namespace poselex
