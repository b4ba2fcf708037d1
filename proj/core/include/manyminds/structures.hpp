#pragma once

#include "manyminds/causal.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

// Abstract switching structures: M determinations of status across N
// two-status switches, arranged by an ascending docket, with a status
// function phi mapping determination slots to signed switch labels.
// Provides validation, immediate-successor enumeration (one new
// determination on an existing switch, or one new four-determination
// switch), and the label-insensitive canonical form.

namespace mm::structures {

using causal::Docket;
using causal::Relation;

struct SwitchingStructure {
    Docket docket;            // M x M ascending relation matrix
    std::vector<int> phi;     // phi[m] in {+-1 .. +-N}, size M

    std::size_t determination_count() const { return phi.size(); }
    int switch_count() const;

    // Determination indices of switch n (1-based), in increasing order.
    std::vector<std::size_t> determinations_of(int n) const;

    bool operator==(const SwitchingStructure& other) const {
        return phi == other.phi && docket == other.docket;
    }
    std::strong_ordering operator<=>(const SwitchingStructure& other) const;
};

struct ValidationIssue {
    std::string clause;   // "positivity", "status-map", "alternation", "docket"
    int switch_index = 0; // 1-based when the issue names a switch, else 0
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool valid() const { return issues.empty(); }
};

// Does the sign sequence contain an alternating subsequence
// s, -s, s, -s of length four?
bool has_alternating_quadruple(const std::vector<int>& signs);

// Checks positivity of M and N, phi mapping onto the switch labels, at
// least four determinations per switch with an alternating quadruple,
// and docket shape/ascending-ness.
ValidationReport validate(const SwitchingStructure& s);

// Relation values allowed for pairs involving a newly inserted
// determination.  Ascending order already rules Future out for
// upper-triangle entries, so the effective menu is a subset of
// {Past, Spacelike} plus Future for rows where the new index is later.
struct SuccessorOptions {
    std::vector<Relation> alphabet = {Relation::Past, Relation::Spacelike, Relation::Future};
    std::uint64_t max_results = 2'000'000; // hard cap; enumeration throws beyond it

    bool allows(Relation r) const;
};

class EnumerationOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Ordered successors adding one determination at the given slot
// (0 <= slot <= M; the new determination takes position slot).
std::vector<SwitchingStructure> determination_successors_at(const SwitchingStructure& s,
                                                         std::size_t slot,
                                                         const SuccessorOptions& opts = {});

// All ordered successors with one new determination on an existing switch.
std::vector<SwitchingStructure> determination_successors(const SwitchingStructure& s,
                                                      const SuccessorOptions& opts = {});

// All ordered successors introducing a new switch with four determinations.
std::vector<SwitchingStructure> switch_successors(const SwitchingStructure& s,
                                                      const SuccessorOptions& opts = {});

// Upper bound on the raw candidate count before filtering, used to refuse
// hopeless enumerations up front.
std::uint64_t successor_candidate_bound(const SwitchingStructure& s, bool b2,
                                        const SuccessorOptions& opts = {});

struct CanonicalForm {
    SwitchingStructure representative;

    bool operator==(const CanonicalForm& other) const {
        return representative == other.representative;
    }
    std::strong_ordering operator<=>(const CanonicalForm& other) const {
        return representative <=> other.representative;
    }
};

// Admissible relabelings: a switch permutation combined with a
// determination permutation that preserves per-switch determination order
// and keeps the docket ascending.
struct Relabeling {
    std::vector<std::size_t> determination_map; // new index -> old index
    std::vector<int> switch_map;                // old switch n -> new label (1-based)
};

SwitchingStructure apply_relabeling(const SwitchingStructure& s, const Relabeling& r);

// Enumerates every admissible relabeling whose relabeled docket is ascending.
std::vector<Relabeling> admissible_relabelings(const SwitchingStructure& s);

// Lexicographically minimal representative over the relabeling orbit.
CanonicalForm canonicalize(const SwitchingStructure& s);

// The set of immediate successors up to relabeling: canonicalized union of
// the one-determination and new-switch successor families.
std::set<CanonicalForm> immediate_successors(const SwitchingStructure& s,
                                             const SuccessorOptions& opts = {});

// Smallest valid structure: one switch determined four times with
// alternating statuses, all regions mutually spacelike unless a docket is
// supplied.
SwitchingStructure minimal_structure();

} // namespace mm::structures
