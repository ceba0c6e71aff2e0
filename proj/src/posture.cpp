#include "poselex/posture.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace poselex {

namespace {

constexpr double kMinSegmentLength = 1e-6;  // meters
constexpr double kDegPerRad = 180.0 / std::numbers::pi;

double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

double angle_between_deg(const Vec3& a, const Vec3& b) {
    return std::acos(clamp_unit(dot(normalized(a), normalized(b)))) * kDegPerRad;
}

}  // namespace

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    return v * (1.0 / n);
}

const std::vector<std::string>& Skeleton::required_joints() {
    static const std::vector<std::string> names = {
        "right_shoulder", "right_elbow", "right_wrist", "torso", "left_shoulder"};
    return names;
}

const Vec3& Skeleton::joint(const std::string& name) const {
    auto it = joints.find(name);
    if (it == joints.end()) {
        throw std::invalid_argument("skeleton is missing joint '" + name + "'");
    }
    return it->second;
}

void Skeleton::validate() const {
    for (const auto& name : required_joints()) {
        const Vec3& p = joint(name);
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw std::invalid_argument("joint '" + name + "' has a non-finite position");
        }
    }
    if (norm(joint("right_elbow") - joint("right_shoulder")) <= kMinSegmentLength) {
        throw std::invalid_argument("shoulder-elbow segment is degenerate");
    }
    if (norm(joint("right_wrist") - joint("right_elbow")) <= kMinSegmentLength) {
        throw std::invalid_argument("elbow-wrist segment is degenerate");
    }
}

AngleQuadruple joints_to_angles(const Skeleton& skeleton) {
    skeleton.validate();

    const Vec3& torso = skeleton.joint("torso");
    const Vec3& r_shoulder = skeleton.joint("right_shoulder");
    const Vec3& l_shoulder = skeleton.joint("left_shoulder");
    const Vec3& elbow = skeleton.joint("right_elbow");
    const Vec3& wrist = skeleton.joint("right_wrist");

    const Vec3 mid_shoulder = (r_shoulder + l_shoulder) * 0.5;
    const Vec3 up_raw = mid_shoulder - torso;
    if (norm(up_raw) <= kMinSegmentLength) {
        throw std::invalid_argument("torso and mid-shoulder coincide; no body vertical");
    }
    const Vec3 up = normalized(up_raw);

    const Vec3 lateral_raw = r_shoulder - l_shoulder;
    const Vec3 front_raw = cross(lateral_raw, up);
    if (norm(front_raw) <= kMinSegmentLength * norm(lateral_raw) ||
        norm(lateral_raw) <= kMinSegmentLength) {
        throw std::invalid_argument(
            "shoulder line is collinear with the body vertical; body plane undefined");
    }
    const Vec3 front = normalized(front_raw);
    const Vec3 lateral = cross(up, front);  // left -> right, orthonormal

    const Vec3 arm = elbow - r_shoulder;
    const Vec3 arm_dir = normalized(arm);
    const Vec3 forearm = wrist - elbow;
    const Vec3 forearm_dir = normalized(forearm);

    AngleQuadruple out;
    out.a_theta = angle_between_deg(up * -1.0, arm_dir);

    // Azimuth in the horizontal body plane; inside (across the body) is +90.
    const double toward_front = dot(arm_dir, front);
    const double toward_inside = -dot(arm_dir, lateral);
    if (std::abs(toward_front) < 1e-12 && std::abs(toward_inside) < 1e-12) {
        out.a_psi = 0.0;  // vertical arm, azimuth undefined
    } else {
        out.a_psi = std::atan2(toward_inside, toward_front) * kDegPerRad;
        if (out.a_psi >= 180.0) out.a_psi = -180.0;
        if (out.a_psi == 0.0) out.a_psi = 0.0;  // avoid -0.0
    }

    // Interior elbow angle: 0 folded, 180 extended.
    out.f_theta = angle_between_deg(arm_dir * -1.0, forearm_dir);

    // Tilt of the forearm component orthogonal to the arm axis, measured from
    // body-up: 0 = vertical, 90 = horizontal.
    const Vec3 off_arm = forearm_dir - arm_dir * dot(forearm_dir, arm_dir);
    if (norm(off_arm) < 1e-9) {
        out.f_psi = 0.0;  // forearm collinear with arm, tilt undefined
    } else {
        out.f_psi = std::acos(clamp_unit(std::abs(dot(normalized(off_arm), up)))) *
                    kDegPerRad;
    }
    return out;
}

RuleTable::RuleTable(LexiconPtr rows, LexiconPtr cols, LexiconPtr out,
                     std::vector<std::size_t> cells)
    : rows_(std::move(rows)),
      cols_(std::move(cols)),
      out_(std::move(out)),
      cells_(std::move(cells)) {
    if (!rows_ || !cols_ || !out_) {
        throw std::invalid_argument("rule table needs row, column and output lexicons");
    }
    if (cells_.size() != rows_->size() * cols_->size()) {
        throw std::invalid_argument("rule table must cover the full row x column grid");
    }
    for (std::size_t v : cells_) {
        if (v >= out_->size()) {
            throw std::invalid_argument("rule table cell points outside the output lexicon");
        }
    }
}

std::size_t RuleTable::cell(std::size_t row, std::size_t col) const {
    if (row >= rows_->size() || col >= cols_->size()) {
        throw std::invalid_argument("rule table cell out of range");
    }
    return cells_[row * cols_->size() + col];
}

const std::string& RuleTable::cell_term(std::size_t row, std::size_t col) const {
    return out_->term(cell(row, col));
}

MassVector evaluate_rule_table(const MassVector& row, const MassVector& col,
                               const RuleTable& table) {
    if (!same_lexicon(row.lexicon(), table.rows()) ||
        !same_lexicon(col.lexicon(), table.cols())) {
        throw std::invalid_argument("mass vectors do not match the rule table lexicons");
    }
    std::vector<double> out(table.out()->size(), 0.0);
    for (std::size_t r = 0; r < row.size(); ++r) {
        double mr = row.masses()[r];
        if (mr == 0.0) continue;
        for (std::size_t c = 0; c < col.size(); ++c) {
            double mc = col.masses()[c];
            if (mc == 0.0) continue;
            out[table.cell(r, c)] += mr * mc;
        }
    }
    return MassVector(table.out(), std::move(out));
}

namespace {

RuleTable build_table(const LexiconPtr& rows, const LexiconPtr& cols,
                      const LexiconPtr& out,
                      const std::vector<std::vector<const char*>>& grid) {
    std::vector<std::size_t> cells;
    cells.reserve(rows->size() * cols->size());
    for (const auto& row : grid) {
        for (const char* term : row) {
            cells.push_back(out->index_of(term));
        }
    }
    return RuleTable(rows, cols, out, std::move(cells));
}

}  // namespace

RuleTable default_arm_table() {
    static const auto a_psi = make_lexicon(
        "a_psi", {"rear", "outside", "front", "inside"});
    static const auto a_theta = make_lexicon("a_theta", {"down", "horizon", "up"});
    // Rows: a-psi terms; columns: a-theta terms.
    return build_table(a_psi, a_theta, arm_lexicon(),
                       {{"down", "rear", "up"},
                        {"down", "outside", "up"},
                        {"down", "front", "up"},
                        {"down", "inside", "up"}});
}

RuleTable default_forearm_table() {
    static const auto f_psi = make_lexicon("f_psi", {"vertical", "horizontal"});
    static const auto f_theta = make_lexicon("f_theta", {"close", "middle", "open"});
    return build_table(f_psi, f_theta, forearm_lexicon(),
                       {{"close", "vmiddle", "open"},
                        {"close", "hmiddle", "open"}});
}

RuleTable default_modal_table() {
    const auto arm = arm_lexicon();
    const auto forearm = forearm_lexicon();
    const auto modal = modal_posture_lexicon();
    std::vector<std::size_t> cells(arm->size() * forearm->size());
    for (std::size_t a = 0; a < arm->size(); ++a) {
        for (std::size_t f = 0; f < forearm->size(); ++f) {
            cells[a * forearm->size() + f] =
                modal->index_of(modal_term(arm->term(a), forearm->term(f)));
        }
    }
    return RuleTable(arm, forearm, modal, std::move(cells));
}

FuzzyPartition default_a_theta_partition() {
    return FuzzyPartition(make_lexicon("a_theta", {"down", "horizon", "up"}),
                          {0.0, 90.0, 180.0}, false);
}

FuzzyPartition default_a_psi_partition() {
    return FuzzyPartition(
        make_lexicon("a_psi", {"rear", "outside", "front", "inside"}),
        {-180.0, -90.0, 0.0, 90.0}, true);
}

FuzzyPartition default_f_theta_partition() {
    return FuzzyPartition(make_lexicon("f_theta", {"close", "middle", "open"}),
                          {0.0, 90.0, 180.0}, false);
}

FuzzyPartition default_f_psi_partition() {
    return FuzzyPartition(make_lexicon("f_psi", {"vertical", "horizontal"}),
                          {0.0, 90.0}, false);
}

PostureModel::PostureModel(FuzzyPartition a_theta_p, FuzzyPartition a_psi_p,
                           FuzzyPartition f_theta_p, FuzzyPartition f_psi_p,
                           RuleTable arm_t, RuleTable forearm_t, RuleTable modal_t)
    : a_theta(std::move(a_theta_p)),
      a_psi(std::move(a_psi_p)),
      f_theta(std::move(f_theta_p)),
      f_psi(std::move(f_psi_p)),
      arm_table(std::move(arm_t)),
      forearm_table(std::move(forearm_t)),
      modal_table(std::move(modal_t)) {
    if (!same_lexicon(arm_table.rows(), a_psi.lexicon()) ||
        !same_lexicon(arm_table.cols(), a_theta.lexicon())) {
        throw std::invalid_argument("arm table does not match the a-psi/a-theta partitions");
    }
    if (!same_lexicon(forearm_table.rows(), f_psi.lexicon()) ||
        !same_lexicon(forearm_table.cols(), f_theta.lexicon())) {
        throw std::invalid_argument(
            "forearm table does not match the f-psi/f-theta partitions");
    }
    if (!same_lexicon(modal_table.rows(), arm_table.out()) ||
        !same_lexicon(modal_table.cols(), forearm_table.out())) {
        throw std::invalid_argument("modal table does not compose with the part tables");
    }
}

PostureModel PostureModel::defaults() {
    return PostureModel(default_a_theta_partition(), default_a_psi_partition(),
                        default_f_theta_partition(), default_f_psi_partition(),
                        default_arm_table(), default_forearm_table(),
                        default_modal_table());
}

MassVector measure_posture(const AngleQuadruple& angles, const PostureModel& model) {
    MassVector arm = evaluate_rule_table(model.a_psi.fuzzify(angles.a_psi),
                                         model.a_theta.fuzzify(angles.a_theta),
                                         model.arm_table);
    MassVector forearm = evaluate_rule_table(model.f_psi.fuzzify(angles.f_psi),
                                             model.f_theta.fuzzify(angles.f_theta),
                                             model.forearm_table);
    return evaluate_rule_table(arm, forearm, model.modal_table);
}

MassVector measure_posture(const Skeleton& skeleton, const PostureModel& model) {
    return measure_posture(joints_to_angles(skeleton), model);
}

std::string_view to_string(ActionClass c) {
    return c == ActionClass::emergency ? "emergency" : "classical";
}

ActionClass action_class_from_string(std::string_view s) {
    if (s == "classical") return ActionClass::classical;
    if (s == "emergency") return ActionClass::emergency;
    throw std::invalid_argument("unknown action class '" + std::string(s) + "'");
}

ReferencePosture learn_reference(std::span<const MassVector> samples,
                                 std::string name, double tolerance,
                                 ActionClass action_class, std::string action_id) {
    if (samples.empty()) {
        throw std::invalid_argument("cannot learn a reference from zero samples");
    }
    if (!(tolerance >= 0.0)) {
        throw std::invalid_argument("reference tolerance must be nonnegative");
    }
    const LexiconPtr& lexicon = samples.front().lexicon();
    std::vector<double> mean(lexicon->size(), 0.0);
    for (const MassVector& s : samples) {
        if (!same_lexicon(s.lexicon(), lexicon)) {
            throw std::invalid_argument("reference samples live on different lexicons");
        }
        for (std::size_t i = 0; i < mean.size(); ++i) {
            mean[i] += s.masses()[i];
        }
    }
    for (double& m : mean) m /= static_cast<double>(samples.size());
    return ReferencePosture{std::move(name), MassVector(lexicon, std::move(mean)),
                            tolerance, action_class, std::move(action_id)};
}

}  // namespace poselex
