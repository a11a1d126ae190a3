#pragma once

// Domain types for the internship assignment problem: hospitals, decision
// units (single interns and couples), preference rankings, stochastic and
// deterministic assignment matrices, and their validators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace intern_match {

// Absolute tolerance for stochastic-matrix invariants. Decomposition
// residuals compound over at most nnz extraction steps, which stays well
// inside this budget at the problem sizes we handle.
inline constexpr double kMatrixTol = 1e-9;

// Entries below this are treated as exact zeros when building supports.
inline constexpr double kZeroTol = 1e-12;

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    double row_sum(int r) const {
        double s = 0.0;
        for (int c = 0; c < cols; ++c) s += at(r, c);
        return s;
    }
    double col_sum(int c) const {
        double s = 0.0;
        for (int r = 0; r < rows; ++r) s += at(r, c);
        return s;
    }
    int nonzeros(double tol = kZeroTol) const {
        int n = 0;
        for (double v : data)
            if (std::abs(v) > tol) ++n;
        return n;
    }
};

struct Hospital {
    std::string id;
    int capacity = 0;
};

enum class UnitKind { Single, Couple };

// A decision unit owns one preference ranking and one row "shape": a single
// intern, or a couple that must be co-located. Couples rank hospitals, not
// pairs of hospitals.
struct DecisionUnit {
    std::string id;
    UnitKind kind = UnitKind::Single;
    std::vector<std::string> members;  // intern ids; size 1 or 2
    std::vector<int> ranking;          // hospital indices, best first

    int seats() const { return kind == UnitKind::Couple ? 2 : 1; }
};

class Problem {
public:
    std::vector<Hospital> hospitals;
    std::vector<DecisionUnit> units;

    // Intern row order is fixed at construction (units in order, couple
    // members in listed order) and shared by every matrix derived from
    // this problem.
    std::vector<std::string> intern_ids;
    std::vector<int> intern_unit;                 // intern row -> unit index
    std::vector<std::vector<int>> unit_interns;   // unit index -> intern rows
    std::vector<std::vector<int>> rank_table;     // unit x hospital -> rank (1-based)

    void build_index() {
        intern_ids.clear();
        intern_unit.clear();
        unit_interns.assign(units.size(), {});
        for (std::size_t u = 0; u < units.size(); ++u) {
            for (const std::string& member : units[u].members) {
                unit_interns[u].push_back(static_cast<int>(intern_ids.size()));
                intern_unit.push_back(static_cast<int>(u));
                intern_ids.push_back(member);
            }
        }
        rank_table.assign(units.size(), std::vector<int>(hospitals.size(), 0));
        for (std::size_t u = 0; u < units.size(); ++u) {
            const auto& ranking = units[u].ranking;
            for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
                int h = ranking[pos];
                if (h >= 0 && h < static_cast<int>(hospitals.size()))
                    rank_table[u][h] = static_cast<int>(pos) + 1;
            }
        }
    }

    int num_interns() const { return static_cast<int>(intern_ids.size()); }
    int num_hospitals() const { return static_cast<int>(hospitals.size()); }
    int num_units() const { return static_cast<int>(units.size()); }

    int total_capacity() const {
        int t = 0;
        for (const Hospital& h : hospitals) t += h.capacity;
        return t;
    }
    int min_capacity() const {
        int q = 0;
        for (const Hospital& h : hospitals) q = (q == 0) ? h.capacity : std::min(q, h.capacity);
        return q;
    }

    bool unit_is_couple(int u) const { return units[u].kind == UnitKind::Couple; }

    int hospital_index(const std::string& id) const {
        for (std::size_t h = 0; h < hospitals.size(); ++h)
            if (hospitals[h].id == id) return static_cast<int>(h);
        return -1;
    }
    int unit_index(const std::string& id) const {
        for (std::size_t u = 0; u < units.size(); ++u)
            if (units[u].id == id) return static_cast<int>(u);
        return -1;
    }
};

// 1 = top choice. Throws on an unknown hospital for the unit.
inline int rank_of(const Problem& problem, int unit, int hospital) {
    if (unit < 0 || unit >= problem.num_units())
        throw std::out_of_range("rank_of: unknown unit");
    if (hospital < 0 || hospital >= problem.num_hospitals())
        throw std::out_of_range("rank_of: unknown hospital");
    int r = problem.rank_table[unit][hospital];
    if (r == 0) throw std::out_of_range("rank_of: hospital missing from ranking");
    return r;
}

struct Violation {
    std::string path;
    std::string message;
};

inline std::vector<Violation> validate_problem(const Problem& p) {
    std::vector<Violation> out;
    std::unordered_set<std::string> hospital_ids;
    for (const Hospital& h : p.hospitals) {
        if (h.capacity < 1)
            out.push_back({"hospitals/" + h.id, "capacity must be >= 1"});
        if (!hospital_ids.insert(h.id).second)
            out.push_back({"hospitals/" + h.id, "duplicate hospital id"});
    }
    std::unordered_set<std::string> intern_ids;
    std::unordered_set<std::string> unit_ids;
    int total_interns = 0;
    for (const DecisionUnit& u : p.units) {
        std::string path = "units/" + u.id;
        if (!unit_ids.insert(u.id).second)
            out.push_back({path, "duplicate unit id"});
        int expected = u.kind == UnitKind::Couple ? 2 : 1;
        if (static_cast<int>(u.members.size()) != expected)
            out.push_back({path, "wrong number of members for unit kind"});
        if (u.kind == UnitKind::Couple && u.members.size() == 2 && u.members[0] == u.members[1])
            out.push_back({path, "couple members must be distinct"});
        for (const std::string& m : u.members) {
            ++total_interns;
            if (!intern_ids.insert(m).second)
                out.push_back({path + "/" + m, "duplicate intern id"});
        }
        // Strict total ranking: every hospital exactly once.
        std::vector<int> seen(p.hospitals.size(), 0);
        bool in_range = true;
        for (int h : u.ranking) {
            if (h < 0 || h >= static_cast<int>(p.hospitals.size())) {
                in_range = false;
                break;
            }
            ++seen[h];
        }
        if (!in_range || u.ranking.size() != p.hospitals.size() ||
            std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }))
            out.push_back({path + "/ranking", "ranking must list every hospital exactly once"});
    }
    if (total_interns < 1)
        out.push_back({"units", "at least one intern required"});
    if (p.total_capacity() != total_interns)
        out.push_back({"hospitals", "capacity/intern mismatch: total capacity " +
                                        std::to_string(p.total_capacity()) + " vs " +
                                        std::to_string(total_interns) + " interns"});
    if (static_cast<int>(p.intern_ids.size()) != total_interns)
        out.push_back({"problem", "index not built (call build_index)"});
    return out;
}

inline std::vector<Violation> validate_target(const Problem& p, const Matrix& m) {
    std::vector<Violation> out;
    if (m.rows != p.num_interns() || m.cols != p.num_hospitals()) {
        out.push_back({"matrix", "dimension mismatch"});
        return out;
    }
    for (int i = 0; i < m.rows; ++i) {
        for (int h = 0; h < m.cols; ++h) {
            double v = m.at(i, h);
            if (v < -kMatrixTol || v > 1.0 + kMatrixTol)
                out.push_back({"matrix/" + p.intern_ids[i] + "/" + p.hospitals[h].id,
                               "entry outside [0,1]"});
        }
        if (std::abs(m.row_sum(i) - 1.0) > kMatrixTol)
            out.push_back({"matrix/" + p.intern_ids[i], "row does not sum to 1"});
    }
    for (int u = 0; u < p.num_units(); ++u) {
        if (!p.unit_is_couple(u)) continue;
        int a = p.unit_interns[u][0], b = p.unit_interns[u][1];
        for (int h = 0; h < m.cols; ++h) {
            if (m.at(a, h) != m.at(b, h)) {
                out.push_back({"matrix/" + p.units[u].id, "couple rows differ"});
                break;
            }
        }
    }
    for (int h = 0; h < m.cols; ++h) {
        if (std::abs(m.col_sum(h) - p.hospitals[h].capacity) > kMatrixTol)
            out.push_back({"matrix/column/" + p.hospitals[h].id,
                           "column sum does not equal capacity"});
    }
    return out;
}

// One hospital per intern; interpreted against a Problem's row order.
struct Assignment {
    std::vector<int> hospital_of;  // per intern row

    Matrix to_matrix(const Problem& p) const {
        Matrix m(p.num_interns(), p.num_hospitals());
        for (int i = 0; i < p.num_interns(); ++i) m.at(i, hospital_of[i]) = 1.0;
        return m;
    }
};

inline std::vector<Violation> validate_assignment(const Problem& p, const Assignment& a) {
    std::vector<Violation> out;
    if (static_cast<int>(a.hospital_of.size()) != p.num_interns()) {
        out.push_back({"assignment", "dimension mismatch"});
        return out;
    }
    std::vector<int> used(p.num_hospitals(), 0);
    for (int i = 0; i < p.num_interns(); ++i) {
        int h = a.hospital_of[i];
        if (h < 0 || h >= p.num_hospitals()) {
            out.push_back({"assignment/" + p.intern_ids[i], "intern not assigned"});
            continue;
        }
        ++used[h];
    }
    for (int h = 0; h < p.num_hospitals(); ++h)
        if (used[h] != p.hospitals[h].capacity)
            out.push_back({"assignment/column/" + p.hospitals[h].id,
                           "seats used != capacity"});
    for (int u = 0; u < p.num_units(); ++u) {
        if (!p.unit_is_couple(u)) continue;
        int a0 = p.unit_interns[u][0], a1 = p.unit_interns[u][1];
        if (a.hospital_of[a0] != a.hospital_of[a1])
            out.push_back({"assignment/" + p.units[u].id, "couple split"});
    }
    return out;
}

struct WeightedAssignment {
    double weight = 0.0;
    Assignment assignment;
};

using ConvexCombination = std::vector<WeightedAssignment>;

inline std::vector<Violation> validate_combination(const Problem& p, const ConvexCombination& c) {
    std::vector<Violation> out;
    double total = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k].weight <= 0.0 || c[k].weight > 1.0 + kMatrixTol)
            out.push_back({"combination/" + std::to_string(k), "weight outside (0,1]"});
        total += c[k].weight;
        auto v = validate_assignment(p, c[k].assignment);
        for (auto& violation : v)
            out.push_back({"combination/" + std::to_string(k) + "/" + violation.path,
                           violation.message});
    }
    if (std::abs(total - 1.0) > kMatrixTol)
        out.push_back({"combination", "weights do not sum to 1"});
    return out;
}

// Weighted mixture of the combination's assignments as a dense matrix.
inline Matrix mixture_matrix(const Problem& p, const ConvexCombination& c) {
    Matrix m(p.num_interns(), p.num_hospitals());
    for (const WeightedAssignment& wa : c)
        for (int i = 0; i < p.num_interns(); ++i)
            m.at(i, wa.assignment.hospital_of[i]) += wa.weight;
    return m;
}

struct DomainMembership {
    std::vector<bool> per_hospital;
    bool in_domain = true;
};

// Checks sum_s M[s,h] >= alpha * 2 * sum_c M[c1,h] for every hospital.
// alpha = 1 is the singles-dominate domain used by the approximation bound.
inline DomainMembership domain_membership(const Problem& p, const Matrix& m, double alpha) {
    DomainMembership result;
    result.per_hospital.resize(p.num_hospitals());
    for (int h = 0; h < p.num_hospitals(); ++h) {
        double singles = 0.0, couples = 0.0;
        for (int u = 0; u < p.num_units(); ++u) {
            int row = p.unit_interns[u][0];
            if (p.unit_is_couple(u))
                couples += m.at(row, h);
            else
                singles += m.at(row, h);
        }
        bool ok = singles >= alpha * 2.0 * couples - kMatrixTol;
        result.per_hospital[h] = ok;
        result.in_domain = result.in_domain && ok;
    }
    return result;
}

// Pre-lottery capacity reduction for direct pickers (interns who choose
// their hospital outside the lottery).
inline Problem with_reduced_capacity(Problem p, const std::vector<std::pair<std::string, int>>& taken) {
    for (const auto& [id, seats] : taken) {
        int h = p.hospital_index(id);
        if (h < 0) throw std::invalid_argument("with_reduced_capacity: unknown hospital " + id);
        p.hospitals[h].capacity -= seats;
        if (p.hospitals[h].capacity < 0)
            throw std::invalid_argument("with_reduced_capacity: capacity underflow at " + id);
    }
    return p;
}

}  // namespace intern_match
