#include "manyminds/serialize.hpp"

#include <json.hpp>

#include <sstream>

namespace mm::serialize {

using nlohmann::json;

namespace {

std::string dump(const json& j, int indent) { return indent < 0 ? j.dump() : j.dump(indent); }

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON");
    return j;
}

json event_to_json(const causal::Event& e) {
    json out = json::array();
    for (int i = 0; i < e.size(); ++i) out.push_back(e[i]);
    return out;
}

causal::Event event_from_json(const json& j) {
    if (!j.is_array() || j.size() < 2) throw ParseError("an event needs at least two coordinates");
    causal::Event e(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) e[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return e;
}

json region_to_json_obj(const causal::Region& region) {
    json out;
    if (region.kind == causal::Region::Kind::Box) {
        out["shape"] = "box";
        out["lo"] = event_to_json(region.lo);
        out["hi"] = event_to_json(region.hi);
    } else {
        out["shape"] = "ball";
        out["center"] = event_to_json(region.center);
        out["radius"] = region.radius;
    }
    return out;
}

causal::Region region_from_json_obj(const json& j) {
    if (!j.contains("shape")) throw ParseError("region needs a shape tag");
    std::string shape = j.at("shape").get<std::string>();
    if (shape == "box")
        return causal::Region::box(event_from_json(j.at("lo")), event_from_json(j.at("hi")));
    if (shape == "ball")
        return causal::Region::ball(event_from_json(j.at("center")), j.at("radius").get<double>());
    throw ParseError("unknown region shape '" + shape + "'");
}

json relation_grid(const causal::Docket& d) {
    json rows = json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::string row;
        for (std::size_t j = 0; j < d.size(); ++j)
            row += (i == j) ? '.' : causal::relation_code(d.at(i, j));
        rows.push_back(row);
    }
    return rows;
}

causal::Docket docket_from_grid(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw ParseError("relation grid must be a nonempty array");
    const std::size_t m = rows.size();
    std::vector<std::vector<causal::Relation>> rel(m,
        std::vector<causal::Relation>(m, causal::Relation::Spacelike));
    for (std::size_t i = 0; i < m; ++i) {
        std::string row = rows[i].get<std::string>();
        if (row.size() != m) throw ParseError("relation grid must be square");
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) rel[i][j] = causal::relation_from_code(row[j]);
    }
    return causal::Docket(std::move(rel));
}

json matrix_to_json_obj(const quantum::Matrix& matrix, const quantum::TensorSpace& space) {
    json out;
    out["dims"] = space.dims;
    json rows = json::array();
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
            row.push_back(json::array({matrix(i, j).real(), matrix(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    out["data"] = std::move(rows);
    return out;
}

std::pair<quantum::Matrix, quantum::TensorSpace> matrix_from_json_obj(const json& j) {
    if (!j.contains("dims")) throw ParseError("matrix needs a factor-dimension header");
    quantum::TensorSpace space(j.at("dims").get<std::vector<int>>());
    const int dim = space.dim();
    const json& data = j.at("data");
    if (!data.is_array() || static_cast<int>(data.size()) != dim)
        throw ParseError("matrix data does not match the declared dimensions");
    quantum::Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const json& row = data[static_cast<std::size_t>(r)];
        if (static_cast<int>(row.size()) != dim) throw ParseError("matrix rows must be square");
        for (int c = 0; c < dim; ++c) {
            const json& cell = row[static_cast<std::size_t>(c)];
            if (!cell.is_array() || cell.size() != 2)
                throw ParseError("matrix entries must be [re, im] pairs");
            m(r, c) = quantum::Complex(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    return {std::move(m), std::move(space)};
}

json matrix_real_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_real_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("expected a matrix");
    const auto rows = j.size();
    const auto cols = j[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    return m;
}

} // namespace

std::string to_json(const causal::Region& region, int indent) {
    return dump(region_to_json_obj(region), indent);
}

causal::Region region_from_json(const std::string& text) {
    return region_from_json_obj(parse(text));
}

std::string to_json(const causal::Docket& docket, int indent) {
    json out;
    out["m"] = docket.size();
    out["rel"] = relation_grid(docket);
    out["ascending"] = docket.ascending();
    return dump(out, indent);
}

causal::Docket docket_from_json(const std::string& text) {
    return docket_from_grid(parse(text).at("rel"));
}

std::string to_json(const structures::SwitchingStructure& s, int indent) {
    json out;
    out["m"] = s.determination_count();
    out["n"] = s.switch_count();
    out["rel"] = relation_grid(s.docket);
    out["phi"] = s.phi;
    return dump(out, indent);
}

structures::SwitchingStructure structure_from_json(const std::string& text) {
    json j = parse(text);
    structures::SwitchingStructure s;
    s.docket = docket_from_grid(j.at("rel"));
    s.phi = j.at("phi").get<std::vector<int>>();
    if (s.phi.size() != s.docket.size())
        throw ParseError("phi length does not match the relation grid");
    return s;
}

std::string to_json(const structures::ValidationReport& report, int indent) {
    json out;
    out["valid"] = report.valid();
    json issues = json::array();
    for (const auto& issue : report.issues) {
        json e;
        e["clause"] = issue.clause;
        e["switch"] = issue.switch_index;
        e["message"] = issue.message;
        issues.push_back(std::move(e));
    }
    out["issues"] = std::move(issues);
    return dump(out, indent);
}

std::string to_json(const quantum::Matrix& matrix, const quantum::TensorSpace& space, int indent) {
    return dump(matrix_to_json_obj(matrix, space), indent);
}

std::pair<quantum::Matrix, quantum::TensorSpace> matrix_from_json(const std::string& text) {
    return matrix_from_json_obj(parse(text));
}

std::string to_json(const geometry::Manifestation& m, int indent) {
    json out;
    out["base_point"] = event_to_json(m.base_point);
    out["base_region"] = region_to_json_obj(m.base_region);
    json theta = json::array();
    for (const auto& t : m.theta)
        theta.push_back(json::array({t.partner_switch, t.k_open, t.k_close}));
    out["theta"] = std::move(theta);
    json tracks = json::array();
    for (const auto& track : m.tracks) {
        json tr;
        tr["T"] = track.path.total_time();
        tr["determination_times"] = track.determination_times;
        tr["collapse_times"] = track.collapse_times;
        tr["first_collapse_index"] = track.first_collapse_index;
        tr["pair_index"] = track.pair_index;
        json segs = json::array();
        for (const auto& seg : track.path.segments()) {
            json sj;
            sj["t_start"] = seg.t_start;
            json u = json::array();
            for (int i = 0; i < seg.velocity.size(); ++i) u.push_back(seg.velocity[i]);
            sj["u"] = std::move(u);
            sj["frame"] = matrix_real_to_json(seg.frame);
            sj["generator"] = matrix_real_to_json(seg.generator);
            segs.push_back(std::move(sj));
        }
        tr["segments"] = std::move(segs);
        tracks.push_back(std::move(tr));
    }
    out["switches"] = std::move(tracks);
    return dump(out, indent);
}

geometry::Manifestation manifestation_from_json(const std::string& text) {
    json j = parse(text);
    geometry::Manifestation m;
    m.base_point = event_from_json(j.at("base_point"));
    m.base_region = region_from_json_obj(j.at("base_region"));
    for (const json& t : j.at("theta")) {
        if (!t.is_array() || t.size() != 3) throw ParseError("theta entries must be triples");
        m.theta.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
    for (const json& tr : j.at("switches")) {
        geometry::SwitchTrack track;
        track.determination_times = tr.at("determination_times").get<std::vector<double>>();
        track.collapse_times = tr.at("collapse_times").get<std::vector<double>>();
        track.first_collapse_index = tr.value("first_collapse_index", 1);
        track.pair_index = tr.value("pair_index", -1);
        std::vector<geometry::PathSegment> segments;
        for (const json& sj : tr.at("segments")) {
            Eigen::VectorXd u = event_from_json(sj.at("u"));
            segments.push_back(geometry::PathSegment::at(
                sj.at("t_start").get<double>(), std::move(u),
                matrix_real_from_json(sj.at("frame")), matrix_real_from_json(sj.at("generator"))));
        }
        track.path = geometry::SwitchPath(m.base_point, std::move(segments),
                                          tr.at("T").get<double>());
        m.tracks.push_back(std::move(track));
    }
    return m;
}

std::string to_json(const geometry::ManifestationReport& report, int indent) {
    json out;
    out["pass"] = report.pass;
    json clauses = json::array();
    for (const auto& c : report.clauses) {
        json e;
        e["clause"] = c.clause;
        e["pass"] = c.pass;
        e["detail"] = c.detail;
        clauses.push_back(std::move(e));
    }
    out["clauses"] = std::move(clauses);
    return dump(out, indent);
}

std::string to_json(const apriori::JumpDistribution& jd, int indent) {
    json out;
    json successors;
    for (const auto& [id, p] : jd.jump) successors[id] = p;
    out["successors"] = successors.is_null() ? json::object() : successors;
    out["extinction"] = jd.extinction;
    out["xi"] = jd.xi;
    return dump(out, indent);
}

apriori::JumpDistribution jump_distribution_from_json(const std::string& text) {
    json j = parse(text);
    apriori::JumpDistribution jd;
    for (const auto& [id, p] : j.at("successors").items()) jd.jump[id] = p.get<double>();
    jd.extinction = j.at("extinction").get<double>();
    jd.xi = j.value("xi", 0.0);
    return jd;
}

std::string to_json(const process::EnsembleStats& stats, int indent) {
    json out;
    out["count"] = stats.count;
    out["seed"] = stats.seed;
    out["extinct"] = stats.extinct;
    out["step_limited"] = stats.step_limited;
    out["absorbed"] = stats.absorbed;
    out["mean_steps"] = stats.mean_steps;
    out["mean_weight"] = stats.mean_weight;
    json terminals;
    for (const auto& [node, count] : stats.terminal_counts) terminals[node] = count;
    out["terminal_counts"] = terminals.is_null() ? json::object() : terminals;
    json visits;
    for (const auto& [node, count] : stats.visit_counts) visits[node] = count;
    out["visit_counts"] = visits.is_null() ? json::object() : visits;
    return dump(out, indent);
}

std::string to_json(const scenarios::ScenarioReport& report, int indent) {
    json out;
    out["scenario"] = report.name;
    out["pass"] = report.pass;
    json checks = json::array();
    for (const auto& c : report.checks) {
        json e;
        e["key"] = c.key;
        e["computed"] = c.computed;
        e["expected"] = c.expected;
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        if (!c.note.empty()) e["note"] = c.note;
        checks.push_back(std::move(e));
    }
    out["checks"] = std::move(checks);
    return dump(out, indent);
}

std::string trajectories_to_csv(const std::vector<process::Trajectory>& trajectories) {
    std::ostringstream out;
    out << "trajectory,step,node,chosen,probability,terminal\n";
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const process::Trajectory& t = trajectories[i];
        for (std::size_t s = 0; s < t.steps.size(); ++s) {
            out << i << ',' << s << ',' << t.steps[s].node << ',' << t.steps[s].chosen << ','
                << t.steps[s].probability << ',';
            out << (s + 1 == t.steps.size() ? process::terminal_name(t.terminal) : "") << '\n';
        }
        if (t.steps.empty())
            out << i << ",0," << t.final_node << ",,1," << process::terminal_name(t.terminal)
                << '\n';
    }
    return out.str();
}

} // namespace mm::serialize
