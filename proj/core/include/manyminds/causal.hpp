#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Minkowski events, box/ball spacetime regions, pairwise causal relations,
// and dockets (causal-arrangement matrices with the ascending property).
//
// Conventions: metric signature (-,+,...,+), c = 1, time is coordinate 0.
// A point u strictly causally precedes v iff dt > 0 and dt >= |dx|; two
// points are spacelike iff |dx| > |dt|.  Relations between regions quantify
// universally over point pairs, so a region is never strictly before itself.

namespace mm::causal {

using Event = Eigen::VectorXd;

class DimensionMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class MixedRelationError : public std::runtime_error {
public:
    MixedRelationError(std::size_t i, std::size_t j)
        : std::runtime_error("regions " + std::to_string(i) + " and " + std::to_string(j) +
                             " are in mixed causal relation; no docket is defined"),
          first(i), second(j) {}
    std::size_t first;
    std::size_t second;
};

enum class Relation : unsigned char { Past, Spacelike, Future, Mixed };

char relation_code(Relation r);
Relation relation_from_code(char c);

// Swaps Past and Future, fixes Spacelike and Mixed.
Relation reverse(Relation r);

struct Region {
    enum class Kind : unsigned char { Box, Ball };

    Kind kind = Kind::Box;
    Event lo, hi;      // box corners, componentwise lo <= hi
    Event center;      // ball center
    double radius = 0; // Euclidean radius over all D coordinates

    static Region box(Event lo, Event hi);
    static Region ball(Event center, double radius);

    int dimension() const;
    Event centroid() const;

    // Smallest axis-aligned box enclosing the region.
    void bounds(Event& out_lo, Event& out_hi) const;

    bool contains(const Event& p) const;

    // Uniform sample from the region; u must have dimension() entries in [0,1)
    // plus one extra entry for the ball's radial draw.
    Event sample(const std::vector<double>& u) const;
};

// Nonempty intersection test (Euclidean, all D coordinates).
bool regions_overlap(const Region& a, const Region& b);

// Closed-form universal causal relation between two regions.
// relation(a,b) == Past means every point of a strictly precedes every
// point of b.  Throws DimensionMismatchError on dimension mismatch.
Relation causal_relation(const Region& a, const Region& b);

// Signed margins behind the classification, useful for tests that must
// stay away from degenerate boundaries.  past holds iff min_dt > 0 and
// min_dt_minus_dist >= 0; spacelike holds iff spacelike_margin > 0.
struct RelationMargins {
    double min_dt = 0;              // min over pairs of (t_b - t_a)
    double min_dt_minus_dist = 0;   // min over pairs of (dt - |dx|)
    double spacelike_margin = 0;    // min over pairs of (|dx| - |dt|)
};
RelationMargins relation_margins(const Region& a, const Region& b);

class Docket {
public:
    Docket() = default;

    // rel[i][j] is the relation of region i to region j; diagonal entries are
    // stored as Spacelike by convention and ignored.  Throws if any off-diagonal
    // entry is Mixed or the matrix breaks Past/Future antisymmetry.
    explicit Docket(std::vector<std::vector<Relation>> rel);

    std::size_t size() const { return rel_.size(); }
    Relation at(std::size_t i, std::size_t j) const { return rel_[i][j]; }
    const std::vector<std::vector<Relation>>& matrix() const { return rel_; }
    bool ascending() const { return ascending_; }

    bool operator==(const Docket& other) const { return rel_ == other.rel_; }
    bool operator!=(const Docket& other) const { return !(*this == other); }

    // Stable total order for canonical forms and set containers.
    std::strong_ordering operator<=>(const Docket& other) const;

private:
    std::vector<std::vector<Relation>> rel_;
    bool ascending_ = true;
};

// Builds the relation matrix of an ordered region sequence.  Throws
// MixedRelationError if some pair does not admit a docket entry.
Docket docket_of(const std::vector<Region>& regions);

// Relabels a docket: rel'[i][j] = rel[pi[i]][pi[j]].  pi must be a
// permutation of {0..M-1}; pi[i] is the old index placed at new index i.
Docket docket_permute(const Docket& d, const std::vector<std::size_t>& pi);

} // namespace mm::causal
