#include "manyminds/structures.hpp"

#include <algorithm>
#include <numeric>

namespace mm::structures {

int SwitchingStructure::switch_count() const {
    int n = 0;
    for (int v : phi) n = std::max(n, std::abs(v));
    return n;
}

std::vector<std::size_t> SwitchingStructure::determinations_of(int n) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < phi.size(); ++m)
        if (std::abs(phi[m]) == n) out.push_back(m);
    return out;
}

std::strong_ordering SwitchingStructure::operator<=>(const SwitchingStructure& other) const {
    if (auto c = phi <=> other.phi; c != 0) return c;
    return docket <=> other.docket;
}

bool has_alternating_quadruple(const std::vector<int>& signs) {
    // Longest strictly alternating subsequence: count sign changes.
    int changes = 0;
    int prev = 0;
    for (int v : signs) {
        int s = v > 0 ? 1 : -1;
        if (prev == 0 || s != prev) {
            if (prev != 0) ++changes;
            prev = s;
        }
    }
    return changes >= 3;
}

ValidationReport validate(const SwitchingStructure& s) {
    ValidationReport report;
    const std::size_t m = s.phi.size();
    if (m == 0) {
        report.issues.push_back({"positivity", 0, "at least one determination is required"});
        return report;
    }
    if (s.docket.size() != m) {
        report.issues.push_back({"docket", 0, "docket size does not match determination count"});
        return report;
    }
    if (!s.docket.ascending())
        report.issues.push_back({"docket", 0, "docket is not ascending"});

    const int n = s.switch_count();
    if (n == 0) {
        report.issues.push_back({"status-map", 0, "phi assigns no switches"});
        return report;
    }
    for (int v : s.phi)
        if (v == 0 || std::abs(v) > n) {
            report.issues.push_back({"status-map", 0, "phi values must lie in {+-1 .. +-N}"});
            return report;
        }
    for (int sw = 1; sw <= n; ++sw) {
        std::vector<std::size_t> dets = s.determinations_of(sw);
        if (dets.empty()) {
            report.issues.push_back({"status-map", sw, "switch has no determinations; phi is not onto"});
            continue;
        }
        if (dets.size() < 4) {
            report.issues.push_back({"alternation", sw, "switch has fewer than four determinations"});
            continue;
        }
        std::vector<int> signs;
        signs.reserve(dets.size());
        for (std::size_t d : dets) signs.push_back(s.phi[d] > 0 ? 1 : -1);
        if (!has_alternating_quadruple(signs))
            report.issues.push_back({"alternation", sw, "switch never opens and closes twice"});
    }
    return report;
}

bool SuccessorOptions::allows(Relation r) const {
    return std::find(alphabet.begin(), alphabet.end(), r) != alphabet.end();
}

namespace {

// Inserts a row for the new determination at `slot`.  relation_to_old[i] is
// the relation of the new region to old region i.
SwitchingStructure insert_determination(const SwitchingStructure& s, std::size_t slot,
                                        int phi_value,
                                        const std::vector<Relation>& relation_to_old) {
    const std::size_t m = s.phi.size();
    const std::size_t m2 = m + 1;
    std::vector<std::vector<Relation>> rel(m2, std::vector<Relation>(m2, Relation::Spacelike));
    auto new_index = [slot](std::size_t old_i) { return old_i < slot ? old_i : old_i + 1; };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            rel[new_index(i)][new_index(j)] = s.docket.at(i, j);
    for (std::size_t i = 0; i < m; ++i) {
        rel[slot][new_index(i)] = relation_to_old[i];
        rel[new_index(i)][slot] = causal::reverse(relation_to_old[i]);
    }
    SwitchingStructure out;
    out.docket = Docket(std::move(rel));
    out.phi.reserve(m2);
    for (std::size_t i = 0; i < m2; ++i) {
        if (i == slot) out.phi.push_back(phi_value);
        else out.phi.push_back(s.phi[i < slot ? i : i - 1]);
    }
    return out;
}

// Relations the alphabet allows for the new determination at `slot` against
// old region i, subject to the ascending property of the larger docket.
std::vector<Relation> allowed_relations(const SuccessorOptions& opts, std::size_t slot,
                                        std::size_t old_index_new_position) {
    std::vector<Relation> out;
    for (Relation r : {Relation::Past, Relation::Spacelike, Relation::Future}) {
        if (!opts.allows(r)) continue;
        if (slot < old_index_new_position && r == Relation::Future) continue;
        if (slot > old_index_new_position && r == Relation::Past) continue;
        out.push_back(r);
    }
    return out;
}

} // namespace

std::uint64_t successor_candidate_bound(const SwitchingStructure& s, bool b2,
                                        const SuccessorOptions& opts) {
    const std::uint64_t m = s.phi.size();
    const std::uint64_t letters = std::min<std::uint64_t>(opts.alphabet.size(), 2);
    auto pow_or_cap = [](std::uint64_t base, std::uint64_t exp) -> std::uint64_t {
        std::uint64_t v = 1;
        for (std::uint64_t i = 0; i < exp; ++i) {
            if (v > (std::uint64_t{1} << 62) / std::max<std::uint64_t>(base, 1))
                return ~std::uint64_t{0};
            v *= base;
        }
        return v;
    };
    if (!b2) {
        std::uint64_t rows = pow_or_cap(letters, m);
        std::uint64_t n = static_cast<std::uint64_t>(s.switch_count());
        return (m + 1) * n * 2 * rows;
    }
    std::uint64_t positions = 1;
    for (std::uint64_t i = 0; i < 4; ++i) positions = positions * (m + 4 - i) / (i + 1);
    std::uint64_t pairs = 4 * m + 6;
    std::uint64_t rows = pow_or_cap(letters, pairs);
    if (rows == ~0ull) return ~0ull;
    std::uint64_t total = positions * 2;
    if (rows > (~0ull) / std::max<std::uint64_t>(total, 1)) return ~0ull;
    return total * rows;
}

std::vector<SwitchingStructure> determination_successors_at(const SwitchingStructure& s,
                                                         std::size_t slot,
                                                         const SuccessorOptions& opts) {
    const std::size_t m = s.phi.size();
    if (slot > m) throw std::invalid_argument("insertion slot out of range");
    const int n = s.switch_count();

    std::vector<SwitchingStructure> out;
    std::vector<Relation> row(m, Relation::Spacelike);
    std::vector<std::vector<Relation>> menus(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t old_pos = i < slot ? i : i + 1;
        menus[i] = allowed_relations(opts, slot, old_pos);
        if (menus[i].empty()) return out;
    }

    std::uint64_t produced = 0;
    auto emit = [&](int phi_value) {
        SwitchingStructure succ = insert_determination(s, slot, phi_value, row);
        if (succ.docket.ascending()) {
            out.push_back(std::move(succ));
            if (++produced > opts.max_results)
                throw EnumerationOverflow("successor enumeration exceeded max_results");
        }
    };
    // Depth-first over the relation row, then over switch and status.
    std::vector<std::size_t> cursor(m, 0);
    while (true) {
        for (std::size_t i = 0; i < m; ++i) row[i] = menus[i][cursor[i]];
        for (int sw = 1; sw <= n; ++sw)
            for (int sign : {+1, -1}) emit(sign * sw);
        std::size_t k = 0;
        while (k < m && ++cursor[k] == menus[k].size()) cursor[k++] = 0;
        if (k == m) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<SwitchingStructure> determination_successors(const SwitchingStructure& s,
                                                      const SuccessorOptions& opts) {
    std::vector<SwitchingStructure> out;
    for (std::size_t slot = 0; slot <= s.phi.size(); ++slot) {
        auto part = determination_successors_at(s, slot, opts);
        out.insert(out.end(), part.begin(), part.end());
        if (out.size() > opts.max_results)
            throw EnumerationOverflow("successor enumeration exceeded max_results");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<SwitchingStructure> switch_successors(const SwitchingStructure& s,
                                                      const SuccessorOptions& opts) {
    const std::size_t m = s.phi.size();
    const int new_switch = s.switch_count() + 1;
    if (successor_candidate_bound(s, true, opts) > opts.max_results)
        throw EnumerationOverflow("new-switch enumeration would exceed max_results; restrict the alphabet");

    std::vector<SwitchingStructure> out;
    std::vector<Relation> letters;
    for (Relation r : {Relation::Past, Relation::Spacelike, Relation::Future})
        if (opts.allows(r)) letters.push_back(r);

    std::vector<std::size_t> positions(4);
    for (positions[0] = 0; positions[0] <= m; ++positions[0])
        for (positions[1] = positions[0] + 1; positions[1] <= m + 1; ++positions[1])
            for (positions[2] = positions[1] + 1; positions[2] <= m + 2; ++positions[2])
                for (positions[3] = positions[2] + 1; positions[3] <= m + 3; ++positions[3]) {
                    const std::size_t m2 = m + 4;
                    std::vector<bool> is_new(m2, false);
                    for (std::size_t p : positions) is_new[p] = true;
                    std::vector<std::size_t> old_at(m2, 0);   // new index -> old index
                    std::vector<std::size_t> new_pos_of(m, 0); // old index -> new index
                    {
                        std::size_t next_old = 0;
                        for (std::size_t i = 0; i < m2; ++i)
                            if (!is_new[i]) {
                                old_at[i] = next_old;
                                new_pos_of[next_old] = i;
                                ++next_old;
                            }
                    }
                    std::vector<std::vector<Relation>> base(
                        m2, std::vector<Relation>(m2, Relation::Spacelike));
                    for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t j = 0; j < m; ++j)
                            base[new_pos_of[i]][new_pos_of[j]] = s.docket.at(i, j);

                    // Pairs needing a relation choice: (new, old) and (new, new).
                    std::vector<std::pair<std::size_t, std::size_t>> free_pairs;
                    for (std::size_t i = 0; i < m2; ++i)
                        for (std::size_t j = i + 1; j < m2; ++j)
                            if (is_new[i] || is_new[j]) free_pairs.emplace_back(i, j);

                    // Ascending order bans Future for every upper-triangle pair.
                    std::vector<Relation> menu;
                    for (Relation r : letters)
                        if (r != Relation::Future) menu.push_back(r);
                    if (menu.empty()) continue;

                    std::vector<std::size_t> cursor(free_pairs.size(), 0);
                    while (true) {
                        std::vector<std::vector<Relation>> rel = base;
                        for (std::size_t t = 0; t < free_pairs.size(); ++t) {
                            auto [i, j] = free_pairs[t];
                            rel[i][j] = menu[cursor[t]];
                            rel[j][i] = causal::reverse(menu[cursor[t]]);
                        }
                        for (int lead : {+1, -1}) {
                            SwitchingStructure succ;
                            succ.docket = Docket(rel);
                            succ.phi.resize(m2);
                            int parity = 0;
                            for (std::size_t i = 0; i < m2; ++i) {
                                if (is_new[i]) {
                                    int sign = (parity % 2 == 0) ? lead : -lead;
                                    succ.phi[i] = sign * new_switch;
                                    ++parity;
                                } else {
                                    succ.phi[i] = s.phi[old_at[i]];
                                }
                            }
                            if (succ.docket.ascending()) {
                                out.push_back(std::move(succ));
                                if (out.size() > opts.max_results)
                                    throw EnumerationOverflow(
                                        "new-switch enumeration exceeded max_results");
                            }
                        }
                        std::size_t t = 0;
                        while (t < cursor.size() && ++cursor[t] == menu.size()) cursor[t++] = 0;
                        if (t == cursor.size() || cursor.empty()) break;
                    }
                }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SwitchingStructure apply_relabeling(const SwitchingStructure& s, const Relabeling& r) {
    const std::size_t m = s.phi.size();
    if (r.determination_map.size() != m)
        throw std::invalid_argument("relabeling size does not match structure");
    SwitchingStructure out;
    out.docket = docket_permute(s.docket, r.determination_map);
    out.phi.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        int old_value = s.phi[r.determination_map[i]];
        int old_switch = std::abs(old_value);
        int new_switch = r.switch_map[static_cast<std::size_t>(old_switch - 1)];
        out.phi[i] = (old_value > 0 ? 1 : -1) * new_switch;
    }
    return out;
}

namespace {

void interleavings(const std::vector<std::vector<std::size_t>>& blocks,
                   std::vector<std::size_t>& counters, std::vector<std::size_t>& current,
                   std::vector<std::vector<std::size_t>>& out) {
    const std::size_t m = current.capacity();
    if (current.size() == m) {
        out.push_back(current);
        return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (counters[b] >= blocks[b].size()) continue;
        current.push_back(blocks[b][counters[b]]);
        ++counters[b];
        interleavings(blocks, counters, current, out);
        --counters[b];
        current.pop_back();
    }
}

} // namespace

std::vector<Relabeling> admissible_relabelings(const SwitchingStructure& s) {
    const int n = s.switch_count();
    const std::size_t m = s.phi.size();
    std::vector<std::vector<std::size_t>> per_switch(static_cast<std::size_t>(n));
    for (int sw = 1; sw <= n; ++sw)
        per_switch[static_cast<std::size_t>(sw - 1)] = s.determinations_of(sw);

    std::vector<int> switch_perm(static_cast<std::size_t>(n));
    std::iota(switch_perm.begin(), switch_perm.end(), 1);

    std::vector<Relabeling> out;
    do {
        // switch_perm[old-1] is the new label of old switch `old`.  The block
        // of new positions assigned new label L must host, in order, the
        // determinations of the old switch mapped to L.
        std::vector<std::vector<std::size_t>> blocks(static_cast<std::size_t>(n));
        for (int old_sw = 1; old_sw <= n; ++old_sw)
            blocks[static_cast<std::size_t>(switch_perm[static_cast<std::size_t>(old_sw - 1)] - 1)] =
                per_switch[static_cast<std::size_t>(old_sw - 1)];

        std::vector<std::vector<std::size_t>> maps;
        std::vector<std::size_t> counters(static_cast<std::size_t>(n), 0);
        std::vector<std::size_t> current;
        current.reserve(m);
        interleavings(blocks, counters, current, maps);

        for (auto& dmap : maps) {
            Relabeling r;
            r.determination_map = std::move(dmap);
            r.switch_map = switch_perm;
            SwitchingStructure candidate = apply_relabeling(s, r);
            if (candidate.docket.ascending()) out.push_back(std::move(r));
        }
    } while (std::next_permutation(switch_perm.begin(), switch_perm.end()));
    return out;
}

CanonicalForm canonicalize(const SwitchingStructure& s) {
    std::optional<SwitchingStructure> best;
    for (const Relabeling& r : admissible_relabelings(s)) {
        SwitchingStructure candidate = apply_relabeling(s, r);
        if (!best || candidate < *best) best = std::move(candidate);
    }
    if (!best) best = s; // the identity is always admissible for ascending dockets
    return CanonicalForm{std::move(*best)};
}

std::set<CanonicalForm> immediate_successors(const SwitchingStructure& s,
                                             const SuccessorOptions& opts) {
    std::set<CanonicalForm> out;
    for (const SwitchingStructure& succ : determination_successors(s, opts))
        out.insert(canonicalize(succ));
    for (const SwitchingStructure& succ : switch_successors(s, opts))
        out.insert(canonicalize(succ));
    return out;
}

SwitchingStructure minimal_structure() {
    SwitchingStructure s;
    std::vector<std::vector<Relation>> rel(4, std::vector<Relation>(4, Relation::Spacelike));
    s.docket = Docket(std::move(rel));
    s.phi = {1, -1, 1, -1};
    return s;
}

} // namespace mm::structures
