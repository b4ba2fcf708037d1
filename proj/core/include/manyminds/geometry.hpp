#pragma once

#include "manyminds/causal.hpp"
#include "manyminds/quantum.hpp"
#include "manyminds/structures.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

// Geometric manifestations of switching structures: piecewise Lorentz paths
// parametrized by proper time, per-switch determination and collapse times,
// the spacetime regions swept by a common base region, and the constraint
// checker (causal ordering of collapses, docket agreement, spatial
// connectedness, the contact-number bound, homogeneity partners, and the
// redetermination timing rule).

namespace mm::geometry {

using causal::Event;
using causal::Region;

Eigen::MatrixXd minkowski_metric(int dim);
double minkowski_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

bool is_restricted_lorentz(const Eigen::MatrixXd& l, double tol = 1e-9);
bool is_lorentz_generator(const Eigen::MatrixXd& g, double tol = 1e-9);

// Boost along the given spatial velocity (size D-1, |v| < 1) and rotation in
// the plane of two spatial axes; generators for both.
Eigen::MatrixXd boost_matrix(const Eigen::VectorXd& velocity);
Eigen::MatrixXd boost_generator(int dim, int spatial_axis, double rapidity);
Eigen::MatrixXd rotation_generator(int dim, int spatial_axis_a, int spatial_axis_b, double angle);

// Matrix exponential by scaled Taylor summation.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

struct PathSegment {
    double t_start = 0;
    Eigen::VectorXd velocity;   // four-velocity in the comoving frame, u.u = -1
    Eigen::MatrixXd frame;      // Lorentz frame at the start of the segment
    Eigen::MatrixXd generator;  // constant Lorentz generator over the segment

    static PathSegment at(double t_start, Eigen::VectorXd u, Eigen::MatrixXd frame,
                          Eigen::MatrixXd generator);
    static PathSegment resting(double t_start, int dim);
};

struct Pose {
    Event position;
    Eigen::MatrixXd frame;
};

class SwitchPath {
public:
    SwitchPath() = default;
    SwitchPath(Event base_point, std::vector<PathSegment> segments, double total_time);

    double total_time() const { return total_time_; }
    const std::vector<PathSegment>& segments() const { return segments_; }
    const Event& base_point() const { return base_point_; }

    Pose pose_at(double t) const; // t in [0, total_time]
    Event position_at(double t) const { return pose_at(t).position; }

    // Validation of the path invariants: unit timelike velocities, restricted
    // Lorentz frames, generator consistency, frame continuity at joins, and
    // the identity initial frame.
    std::vector<std::string> validate(double tol = 1e-9) const;

private:
    Event base_point_;
    std::vector<PathSegment> segments_;
    double total_time_ = 0;
};

// Convenience: a switch that never moves and never rotates.
SwitchPath static_path(Event base_point, double total_time);
// A path that is carried by the given constant generator from t = 0.
SwitchPath generator_path(Event base_point, const Eigen::MatrixXd& generator,
                          Eigen::VectorXd velocity, double total_time);

struct ThetaEntry {
    int partner_switch = 0; // 1-based n'
    int k_open = 0;         // 1-based k'
    int k_close = 0;        // 1-based k''
};

struct SwitchTrack {
    SwitchPath path;
    std::vector<double> determination_times; // t_{n1} < ... < t_{nK}
    std::vector<double> collapse_times;      // t'_{n,m_i} <= ... <= t'_{n,m_f}
    int first_collapse_index = 1;            // m_n^i, 1-based
    int pair_index = -1;                     // index into a projection registry

    double activation_time() const {
        return determination_times.empty() ? 0.0 : determination_times.front();
    }
};

struct Manifestation {
    Event base_point;
    Region base_region;
    std::vector<ThetaEntry> theta;    // one entry per switch
    std::vector<SwitchTrack> tracks;  // one entry per switch
};

// The spacetime region occupied by switch n (1-based) at proper time t:
// the base region carried by the path's Poincare map.  Exact for pure
// translations; a bounding box/ball otherwise.
Region region_at(const Manifestation& m, int n, double t);

// Regions at the determination times, ordered by global determination index.
std::vector<Region> determination_regions(const Manifestation& m,
                                          const structures::SwitchingStructure& s);

// Builds the docket of the determination regions.
causal::Docket docket_from_manifestation(const Manifestation& m,
                                         const structures::SwitchingStructure& s);

struct CheckOptions {
    double samples_per_unit_time = 64; // tube sampling density
    int contact_number = 13;           // C in the contact bound
};

struct ClauseResult {
    std::string clause; // "determination-order" .. "projection-pairs"
    bool pass = true;
    std::string detail;
};

struct ManifestationReport {
    std::vector<ClauseResult> clauses;
    bool pass = true;

    const ClauseResult* find(const std::string& clause) const;
};

// Full constraint report for a manifestation of the given structure.  The
// projection registry backs the orthogonal-pair clause; when null that clause
// reports failure for out-of-range indices only if any index is set.
ManifestationReport check_manifestation(const Manifestation& m,
                                        const structures::SwitchingStructure& s,
                                        const CheckOptions& opts = {},
                                        const quantum::ProjectionRegistry* registry = nullptr);

} // namespace mm::geometry
