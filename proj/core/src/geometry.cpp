#include "manyminds/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mm::geometry {

Eigen::MatrixXd minkowski_metric(int dim) {
    Eigen::MatrixXd eta = Eigen::MatrixXd::Identity(dim, dim);
    eta(0, 0) = -1.0;
    return eta;
}

double minkowski_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double out = -a[0] * b[0];
    for (int i = 1; i < a.size(); ++i) out += a[i] * b[i];
    return out;
}

bool is_restricted_lorentz(const Eigen::MatrixXd& l, double tol) {
    if (l.rows() != l.cols()) return false;
    const int d = static_cast<int>(l.rows());
    Eigen::MatrixXd eta = minkowski_metric(d);
    if ((l.transpose() * eta * l - eta).norm() > tol) return false;
    if (std::abs(l.determinant() - 1.0) > std::max(tol, 1e-9)) return false;
    return l(0, 0) > 0;
}

bool is_lorentz_generator(const Eigen::MatrixXd& g, double tol) {
    if (g.rows() != g.cols()) return false;
    Eigen::MatrixXd eta = minkowski_metric(static_cast<int>(g.rows()));
    return (g.transpose() * eta + eta * g).norm() <= tol * std::max(1.0, g.norm());
}

Eigen::MatrixXd boost_matrix(const Eigen::VectorXd& velocity) {
    const int d = static_cast<int>(velocity.size()) + 1;
    double v2 = velocity.squaredNorm();
    if (v2 >= 1.0) throw std::invalid_argument("boost velocity must be below 1");
    double gamma = 1.0 / std::sqrt(1.0 - v2);
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(d, d);
    l(0, 0) = gamma;
    for (int i = 0; i < d - 1; ++i) {
        l(0, i + 1) = gamma * velocity[i];
        l(i + 1, 0) = gamma * velocity[i];
        for (int j = 0; j < d - 1; ++j)
            l(i + 1, j + 1) += (v2 > 0 ? (gamma - 1.0) * velocity[i] * velocity[j] / v2 : 0.0);
    }
    return l;
}

Eigen::MatrixXd boost_generator(int dim, int spatial_axis, double rapidity) {
    if (spatial_axis < 0 || spatial_axis >= dim - 1)
        throw std::invalid_argument("spatial axis out of range");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    g(0, spatial_axis + 1) = rapidity;
    g(spatial_axis + 1, 0) = rapidity;
    return g;
}

Eigen::MatrixXd rotation_generator(int dim, int spatial_axis_a, int spatial_axis_b, double angle) {
    if (spatial_axis_a == spatial_axis_b || spatial_axis_a < 0 || spatial_axis_b < 0 ||
        spatial_axis_a >= dim - 1 || spatial_axis_b >= dim - 1)
        throw std::invalid_argument("rotation axes out of range");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    g(spatial_axis_a + 1, spatial_axis_b + 1) = -angle;
    g(spatial_axis_b + 1, spatial_axis_a + 1) = angle;
    return g;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
    const int d = static_cast<int>(a.rows());
    double norm = a.norm();
    int squarings = 0;
    Eigen::MatrixXd scaled = a;
    while (norm > 0.5) {
        scaled *= 0.5;
        norm *= 0.5;
        ++squarings;
    }
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 24; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
        if (term.norm() < 1e-18) break;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

namespace {

// Integral of the frame over a segment: phi(tau, G) = int_0^tau exp(sG) ds,
// via the augmented-matrix exponential.
Eigen::MatrixXd frame_integral(const Eigen::MatrixXd& g, double tau) {
    const int d = static_cast<int>(g.rows());
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    aug.topLeftCorner(d, d) = g * tau;
    aug.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d) * tau;
    Eigen::MatrixXd e = expm(aug);
    return e.topRightCorner(d, d);
}

} // namespace

PathSegment PathSegment::at(double t_start, Eigen::VectorXd u, Eigen::MatrixXd frame,
                            Eigen::MatrixXd generator) {
    PathSegment s;
    s.t_start = t_start;
    s.velocity = std::move(u);
    s.frame = std::move(frame);
    s.generator = std::move(generator);
    return s;
}

PathSegment PathSegment::resting(double t_start, int dim) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
    u[0] = 1.0;
    return at(t_start, std::move(u), Eigen::MatrixXd::Identity(dim, dim),
              Eigen::MatrixXd::Zero(dim, dim));
}

SwitchPath::SwitchPath(Event base_point, std::vector<PathSegment> segments, double total_time)
    : base_point_(std::move(base_point)), segments_(std::move(segments)), total_time_(total_time) {
    if (segments_.empty()) throw std::invalid_argument("a path needs at least one segment");
    if (segments_.front().t_start != 0.0)
        throw std::invalid_argument("the first segment must start at proper time 0");
    for (std::size_t i = 1; i < segments_.size(); ++i)
        if (segments_[i].t_start <= segments_[i - 1].t_start)
            throw std::invalid_argument("segment start times must increase");
    if (total_time_ < segments_.back().t_start)
        throw std::invalid_argument("total proper time ends before the last segment");
}

Pose SwitchPath::pose_at(double t) const {
    if (t < 0.0 || t > total_time_ + 1e-12)
        throw std::out_of_range("proper time outside [0, T]");
    const int d = static_cast<int>(base_point_.size());
    Event x = base_point_;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const PathSegment& seg = segments_[k];
        double seg_end = (k + 1 < segments_.size()) ? segments_[k + 1].t_start : total_time_;
        double upto = std::min(t, seg_end);
        double tau = upto - seg.t_start;
        if (tau < 0) break;
        x += seg.frame * frame_integral(seg.generator, tau) * seg.velocity;
        if (t <= seg_end) {
            Pose p;
            p.position = x;
            p.frame = seg.frame * expm(Eigen::MatrixXd(seg.generator * tau));
            return p;
        }
    }
    Pose p;
    p.position = x;
    p.frame = segments_.back().frame *
              expm(Eigen::MatrixXd(segments_.back().generator *
                                   (total_time_ - segments_.back().t_start)));
    (void)d;
    return p;
}

std::vector<std::string> SwitchPath::validate(double tol) const {
    std::vector<std::string> issues;
    const int d = static_cast<int>(base_point_.size());
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const PathSegment& seg = segments_[k];
        if (seg.velocity.size() != d || seg.frame.rows() != d || seg.generator.rows() != d) {
            issues.push_back("segment " + std::to_string(k) + " has mismatched dimensions");
            continue;
        }
        double uu = minkowski_dot(seg.velocity, seg.velocity);
        if (std::abs(uu + 1.0) > tol)
            issues.push_back("segment " + std::to_string(k) + " velocity is not unit timelike");
        if (seg.velocity[0] <= 0)
            issues.push_back("segment " + std::to_string(k) + " velocity is not future directed");
        if (!is_restricted_lorentz(seg.frame, tol))
            issues.push_back("segment " + std::to_string(k) + " frame is not restricted Lorentz");
        if (!is_lorentz_generator(seg.generator, tol))
            issues.push_back("segment " + std::to_string(k) + " generator does not preserve the metric");
    }
    if (!segments_.empty() &&
        (segments_.front().frame - Eigen::MatrixXd::Identity(d, d)).norm() > tol)
        issues.push_back("the initial frame must be the identity");
    for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
        double dt = segments_[k + 1].t_start - segments_[k].t_start;
        Eigen::MatrixXd expected =
            segments_[k].frame * expm(Eigen::MatrixXd(segments_[k].generator * dt));
        if ((expected - segments_[k + 1].frame).norm() > std::max(tol, 1e-9) * 10.0)
            issues.push_back("frame discontinuity entering segment " + std::to_string(k + 1));
    }
    return issues;
}

SwitchPath static_path(Event base_point, double total_time) {
    const int d = static_cast<int>(base_point.size());
    return SwitchPath(std::move(base_point), {PathSegment::resting(0.0, d)}, total_time);
}

SwitchPath generator_path(Event base_point, const Eigen::MatrixXd& generator,
                          Eigen::VectorXd velocity, double total_time) {
    const int d = static_cast<int>(base_point.size());
    PathSegment seg = PathSegment::at(0.0, std::move(velocity),
                                      Eigen::MatrixXd::Identity(d, d), generator);
    return SwitchPath(std::move(base_point), {std::move(seg)}, total_time);
}

Region region_at(const Manifestation& m, int n, double t) {
    if (n < 1 || n > static_cast<int>(m.tracks.size()))
        throw std::out_of_range("switch index out of range");
    const SwitchTrack& track = m.tracks[static_cast<std::size_t>(n - 1)];
    Pose pose = track.path.pose_at(t);
    const Eigen::MatrixXd& l = pose.frame;
    const int d = static_cast<int>(m.base_point.size());
    bool translation_only = (l - Eigen::MatrixXd::Identity(d, d)).norm() <= 1e-12;

    if (m.base_region.kind == Region::Kind::Ball) {
        Event center = pose.position + l * (m.base_region.center - m.base_point);
        double radius = m.base_region.radius;
        if (!translation_only) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(l);
            radius *= svd.singularValues()[0];
        }
        return Region::ball(std::move(center), radius);
    }
    Event mid = 0.5 * (m.base_region.lo + m.base_region.hi);
    Event half = 0.5 * (m.base_region.hi - m.base_region.lo);
    Event center = pose.position + l * (mid - m.base_point);
    Event new_half(d);
    if (translation_only) {
        new_half = half;
    } else {
        for (int i = 0; i < d; ++i) {
            double h = 0;
            for (int j = 0; j < d; ++j) h += std::abs(l(i, j)) * half[j];
            new_half[i] = h;
        }
    }
    return Region::box(center - new_half, center + new_half);
}

std::vector<Region> determination_regions(const Manifestation& m,
                                          const structures::SwitchingStructure& s) {
    const std::size_t total = s.determination_count();
    std::vector<Region> regions(total, m.base_region);
    const int n = s.switch_count();
    if (static_cast<int>(m.tracks.size()) != n)
        throw std::invalid_argument("track count does not match the structure's switch count");
    for (int sw = 1; sw <= n; ++sw) {
        const SwitchTrack& track = m.tracks[static_cast<std::size_t>(sw - 1)];
        std::vector<std::size_t> dets = s.determinations_of(sw);
        if (dets.size() != track.determination_times.size())
            throw std::invalid_argument("determination time count does not match phi for switch " +
                                        std::to_string(sw));
        for (std::size_t k = 0; k < dets.size(); ++k)
            regions[dets[k]] = region_at(m, sw, track.determination_times[k]);
    }
    return regions;
}

causal::Docket docket_from_manifestation(const Manifestation& m,
                                         const structures::SwitchingStructure& s) {
    return causal::docket_of(determination_regions(m, s));
}

const ClauseResult* ManifestationReport::find(const std::string& clause) const {
    for (const ClauseResult& c : clauses)
        if (c.clause == clause) return &c;
    return nullptr;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::vector<double> sample_times(const SwitchTrack& track, double samples_per_unit) {
    double s = track.activation_time();
    double t_end = track.path.total_time();
    std::vector<double> times;
    double step = 1.0 / std::max(samples_per_unit, 1.0);
    for (double t = s; t < t_end; t += step) times.push_back(t);
    times.push_back(t_end);
    times.insert(times.end(), track.determination_times.begin(), track.determination_times.end());
    for (double t : track.collapse_times)
        if (t >= s && t <= t_end) times.push_back(t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                times.end());
    return times;
}

// Closure of the causal future: dt >= 0 and dt >= |dx| up to rounding slack.
bool in_causal_future_closure(const Event& later, const Event& earlier) {
    double dt = later[0] - earlier[0];
    if (dt < -1e-12) return false;
    double dx2 = 0;
    for (int i = 1; i < later.size(); ++i) {
        double d = later[i] - earlier[i];
        dx2 += d * d;
    }
    return dt * dt >= dx2 - 1e-12 || dt >= std::sqrt(dx2) - 1e-9;
}

} // namespace

ManifestationReport check_manifestation(const Manifestation& m,
                                        const structures::SwitchingStructure& s,
                                        const CheckOptions& opts,
                                        const quantum::ProjectionRegistry* registry) {
    ManifestationReport report;
    auto add = [&report](std::string clause, bool pass, std::string detail) {
        report.pass = report.pass && pass;
        report.clauses.push_back({std::move(clause), pass, std::move(detail)});
    };

    const int n = s.switch_count();
    if (static_cast<int>(m.tracks.size()) != n || static_cast<int>(m.theta.size()) != n) {
        add("shape", false, "track or theta count does not match the structure");
        return report;
    }

    // C2/C3: ordering of determination and collapse times.
    bool det_order_ok = true, collapse_order_ok = true;
    std::string det_order_detail, collapse_order_detail;
    for (int sw = 1; sw <= n; ++sw) {
        const SwitchTrack& track = m.tracks[static_cast<std::size_t>(sw - 1)];
        const auto& dt = track.determination_times;
        std::vector<std::size_t> dets = s.determinations_of(sw);
        if (dt.size() != dets.size()) {
            det_order_ok = false;
            det_order_detail = "switch " + std::to_string(sw) + " has " + std::to_string(dt.size()) +
                        " determination times for " + std::to_string(dets.size()) + " determinations";
            continue;
        }
        for (std::size_t k = 0; k < dt.size(); ++k) {
            bool ok = dt[k] >= 0 && dt[k] <= track.path.total_time() &&
                      (k == 0 || dt[k] > dt[k - 1]);
            if (!ok) {
                det_order_ok = false;
                det_order_detail = "switch " + std::to_string(sw) + " determination times are not strictly increasing in [0, T]";
            }
        }
        const auto& ct = track.collapse_times;
        if (track.first_collapse_index < 1) {
            collapse_order_ok = false;
            collapse_order_detail = "switch " + std::to_string(sw) + " first collapse index below 1";
        }
        if (!ct.empty()) {
            if (std::abs(ct.front() - track.activation_time()) > 1e-9) {
                collapse_order_ok = false;
                collapse_order_detail = "switch " + std::to_string(sw) + " first collapse time differs from the activation time";
            }
            for (std::size_t i = 0; i + 1 < ct.size(); ++i)
                if (ct[i] > ct[i + 1] + 1e-12) {
                    collapse_order_ok = false;
                    collapse_order_detail = "switch " + std::to_string(sw) + " collapse times decrease";
                }
            if (ct.back() > track.path.total_time() + 1e-12) {
                collapse_order_ok = false;
                collapse_order_detail = "switch " + std::to_string(sw) + " collapse times exceed T";
            }
        }
    }
    add("determination-order", det_order_ok, det_order_detail);
    add("collapse-order", collapse_order_ok, collapse_order_detail);

    // C4-C7: path invariants.
    {
        bool ok = true;
        std::string detail;
        for (int sw = 1; sw <= n; ++sw) {
            auto issues = m.tracks[static_cast<std::size_t>(sw - 1)].path.validate();
            if (!issues.empty()) {
                ok = false;
                detail = "switch " + std::to_string(sw) + ": " + issues.front();
            }
            const Event& bp = m.tracks[static_cast<std::size_t>(sw - 1)].path.base_point();
            if ((bp - m.base_point).norm() > 1e-9) {
                ok = false;
                detail = "switch " + std::to_string(sw) + " path does not start at the base point";
            }
        }
        add("path", ok, detail);
    }

    // Determination points (needed by C8 and the region clauses).
    std::vector<Event> det_points;
    for (int sw = 1; sw <= n; ++sw) {
        const SwitchTrack& track = m.tracks[static_cast<std::size_t>(sw - 1)];
        for (double t : track.determination_times)
            det_points.push_back(track.path.position_at(t));
    }

    // C8: the m-th collapse lies in the causal future of at least m
    // determination points.
    {
        bool ok = true;
        std::string detail;
        for (int sw = 1; sw <= n && ok; ++sw) {
            const SwitchTrack& track = m.tracks[static_cast<std::size_t>(sw - 1)];
            for (std::size_t i = 0; i < track.collapse_times.size(); ++i) {
                int collapse_index = track.first_collapse_index + static_cast<int>(i);
                Event p = track.path.position_at(track.collapse_times[i]);
                int count = 0;
                for (const Event& q : det_points)
                    if (in_causal_future_closure(p, q)) ++count;
                if (count < collapse_index) {
                    ok = false;
                    detail = "switch " + std::to_string(sw) + " collapse " +
                             std::to_string(collapse_index) + " is caused by only " +
                             std::to_string(count) + " determinations";
                    break;
                }
            }
        }
        add("collapse-causality", ok, detail);
    }

    // C9: the built docket matches the structure's docket.
    std::optional<causal::Docket> built;
    {
        bool ok = true;
        std::string detail;
        try {
            built = docket_from_manifestation(m, s);
            if (!(*built == s.docket)) {
                ok = false;
                detail = "determination regions realize a different docket";
            }
        } catch (const causal::MixedRelationError& e) {
            ok = false;
            detail = e.what();
        }
        add("docket-agreement", ok, detail);
    }

    // Sampled switch tubes, shared by C10, C11, and C12.
    struct Node {
        int switch_index;
        double t;
        Region region;
    };
    std::vector<Node> nodes;
    std::vector<std::vector<std::size_t>> nodes_of_switch(static_cast<std::size_t>(n));
    for (int sw = 1; sw <= n; ++sw) {
        const SwitchTrack& track = m.tracks[static_cast<std::size_t>(sw - 1)];
        for (double t : sample_times(track, opts.samples_per_unit_time)) {
            nodes_of_switch[static_cast<std::size_t>(sw - 1)].push_back(nodes.size());
            nodes.push_back({sw, t, region_at(m, sw, t)});
        }
    }

    // C10: spacelike determination pairs are connected through the overlap
    // graph of the sampled tubes.
    {
        bool ok = true;
        std::string detail;
        if (!built) {
            ok = false;
            detail = "docket unavailable";
        } else {
            UnionFind uf(nodes.size());
            for (std::size_t a = 0; a < nodes.size(); ++a)
                for (std::size_t b = a + 1; b < nodes.size(); ++b)
                    if (causal::regions_overlap(nodes[a].region, nodes[b].region)) uf.unite(a, b);

            // Node of the k-th determination of switch sw.
            auto det_node = [&](int sw, double t) -> std::size_t {
                for (std::size_t idx : nodes_of_switch[static_cast<std::size_t>(sw - 1)])
                    if (std::abs(nodes[idx].t - t) < 1e-12) return idx;
                return nodes.size();
            };
            std::vector<std::size_t> det_nodes;
            std::vector<std::size_t> det_owner;
            for (int sw = 1; sw <= n; ++sw) {
                const SwitchTrack& track = m.tracks[static_cast<std::size_t>(sw - 1)];
                std::vector<std::size_t> dets = s.determinations_of(sw);
                for (std::size_t k = 0; k < dets.size(); ++k) {
                    det_nodes.push_back(det_node(sw, track.determination_times[k]));
                    det_owner.push_back(dets[k]);
                }
            }
            for (std::size_t a = 0; a < det_nodes.size() && ok; ++a)
                for (std::size_t b = a + 1; b < det_nodes.size() && ok; ++b) {
                    if (built->at(det_owner[a], det_owner[b]) != causal::Relation::Spacelike)
                        continue;
                    if (uf.find(det_nodes[a]) != uf.find(det_nodes[b])) {
                        ok = false;
                        detail = "spacelike determinations " + std::to_string(det_owner[a]) + " and " +
                                 std::to_string(det_owner[b]) + " are not connected by the switch tubes";
                    }
                }
        }
        add("connectedness", ok, detail);
    }

    // C11: contact counts stay within the contact number.
    {
        bool ok = true;
        std::string detail;
        int worst = 0;
        for (int sw = 1; sw <= n; ++sw) {
            for (std::size_t idx : nodes_of_switch[static_cast<std::size_t>(sw - 1)]) {
                int contacts = 0;
                for (int other = 1; other <= n; ++other) {
                    if (other == sw) continue;
                    bool hit = false;
                    for (std::size_t jdx : nodes_of_switch[static_cast<std::size_t>(other - 1)])
                        if (causal::regions_overlap(nodes[idx].region, nodes[jdx].region)) {
                            hit = true;
                            break;
                        }
                    if (hit) ++contacts;
                }
                worst = std::max(worst, contacts);
            }
        }
        if (worst > opts.contact_number) {
            ok = false;
            detail = "a switch is contacted by " + std::to_string(worst) + " others (bound " +
                     std::to_string(opts.contact_number) + ")";
        } else {
            detail = "max contact count " + std::to_string(worst);
        }
        add("contact-bound", ok, detail);
    }

    // C12: theta well-formedness and the non-ordering clause.
    {
        bool ok = true;
        std::string detail;
        for (int sw = 1; sw <= n && ok; ++sw) {
            const ThetaEntry& th = m.theta[static_cast<std::size_t>(sw - 1)];
            if (th.partner_switch < 1 || th.partner_switch > n) {
                ok = false;
                detail = "theta of switch " + std::to_string(sw) + " names no valid partner";
                break;
            }
            if (n > 1 && th.partner_switch == sw) {
                ok = false;
                detail = "theta of switch " + std::to_string(sw) + " must name another switch";
                break;
            }
            std::vector<std::size_t> partner_dets = s.determinations_of(th.partner_switch);
            if (th.k_open < 1 || th.k_close <= th.k_open ||
                th.k_close > static_cast<int>(partner_dets.size())) {
                ok = false;
                detail = "theta of switch " + std::to_string(sw) + " has bad determination indices";
                break;
            }
            int sign_open = s.phi[partner_dets[static_cast<std::size_t>(th.k_open - 1)]];
            int sign_close = s.phi[partner_dets[static_cast<std::size_t>(th.k_close - 1)]];
            if (sign_open != -sign_close) {
                ok = false;
                detail = "theta of switch " + std::to_string(sw) + " must reference opposite statuses";
                break;
            }
            // Existence over the sampled grid of a tube region neither
            // strictly before nor strictly after the first determination.
            std::vector<std::size_t> own = s.determinations_of(sw);
            const SwitchTrack& track = m.tracks[static_cast<std::size_t>(sw - 1)];
            Region first_region = region_at(m, sw, track.determination_times.front());
            (void)own;
            bool found = false;
            for (std::size_t jdx : nodes_of_switch[static_cast<std::size_t>(th.partner_switch - 1)]) {
                causal::Relation r = causal::causal_relation(first_region, nodes[jdx].region);
                if (r != causal::Relation::Past && r != causal::Relation::Future) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                ok = false;
                detail = "switch " + std::to_string(sw) +
                         " is strictly ordered against every sampled partner region";
            }
        }
        add("partner", ok, detail);
    }

    // C13: a status cannot be redetermined faster than half the minimum
    // alternation cycle.
    {
        bool ok = true;
        std::string detail;
        for (int sw = 1; sw <= n && ok; ++sw) {
            const SwitchTrack& track = m.tracks[static_cast<std::size_t>(sw - 1)];
            std::vector<std::size_t> dets = s.determinations_of(sw);
            const std::size_t kcount = dets.size();
            const auto& t = track.determination_times;
            if (t.size() != kcount) continue; // already reported under C2
            auto sign = [&](std::size_t k) { return s.phi[dets[k]] > 0 ? 1 : -1; };
            double min_cycle = std::numeric_limits<double>::infinity();
            for (std::size_t k1 = 0; k1 < kcount; ++k1)
                for (std::size_t k2 = k1 + 1; k2 < kcount; ++k2)
                    for (std::size_t k3 = k2 + 1; k3 < kcount; ++k3)
                        if (sign(k1) == -sign(k2) && sign(k2) == -sign(k3))
                            min_cycle = std::min(min_cycle, t[k3] - t[k1]);
            if (!std::isfinite(min_cycle)) continue;
            for (std::size_t k4 = 0; k4 < kcount && ok; ++k4)
                for (std::size_t k5 = k4 + 1; k5 < kcount && ok; ++k5) {
                    if (sign(k4) != sign(k5)) continue;
                    if (t[k5] - t[k4] < 0.5 * min_cycle - 1e-12) {
                        ok = false;
                        detail = "switch " + std::to_string(sw) + " redetermines a status after " +
                                 std::to_string(t[k5] - t[k4]) + " against a half cycle of " +
                                 std::to_string(0.5 * min_cycle);
                    }
                }
        }
        add("timing", ok, detail);
    }

    // C14: registered orthogonal projection pairs.
    {
        bool ok = true;
        std::string detail;
        if (registry == nullptr) {
            detail = "not checked (no projection registry)";
        } else {
            for (int sw = 1; sw <= n; ++sw) {
                int idx = m.tracks[static_cast<std::size_t>(sw - 1)].pair_index;
                if (!registry->valid_index(idx)) {
                    ok = false;
                    detail = "switch " + std::to_string(sw) + " references no registered projection pair";
                    break;
                }
            }
        }
        add("projection-pairs", ok, detail);
    }

    return report;
}

} // namespace mm::geometry
