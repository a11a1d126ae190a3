#pragma once

// File formats: hospitals CSV (hospital_id,capacity), preferences CSV
// (unit_id,kind,member_ids,rank1,...,rankm with ';' between couple member
// ids), matrices as CSV with a hospital-id header row, decompositions as
// JSON weighted assignment lists, area maps as hospital_id,area CSV, and
// graphs as "u v" edge lists. Lines starting with '#' are metadata
// comments and are skipped on read.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "intern_match/instances.hpp"
#include "intern_match/model.hpp"

namespace intern_match {

class IoError : public std::runtime_error {
public:
    IoError(const std::string& file, long line, const std::string& message)
        : std::runtime_error(file + (line > 0 ? ":" + std::to_string(line) : "") + ": " + message) {}
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Reads non-empty, non-comment lines with their line numbers.
inline std::vector<std::pair<long, std::string>> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, 0, "cannot open file");
    std::vector<std::pair<long, std::string>> out;
    std::string line;
    long number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.push_back({number, t});
    }
    return out;
}

}  // namespace detail

inline std::vector<Hospital> read_hospitals_csv(const std::string& path) {
    std::vector<Hospital> hospitals;
    for (const auto& [number, line] : detail::read_lines(path)) {
        auto fields = detail::split_csv(line);
        if (fields.size() != 2)
            throw IoError(path, number, "expected hospital_id,capacity");
        if (fields[0] == "hospital_id") continue;  // optional header
        try {
            hospitals.push_back({detail::trim(fields[0]), std::stoi(fields[1])});
        } catch (const std::exception&) {
            throw IoError(path, number, "capacity is not an integer");
        }
    }
    return hospitals;
}

inline void write_hospitals_csv(const std::string& path, const std::vector<Hospital>& hospitals,
                                const std::string& header_comment = "") {
    std::ofstream out(path);
    if (!out) throw IoError(path, 0, "cannot open file for writing");
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "hospital_id,capacity\n";
    for (const Hospital& h : hospitals) out << h.id << "," << h.capacity << "\n";
}

// Preferences CSV rows: unit_id,kind,member_ids,rank1,...,rankm. Hospital
// ids in rank columns refer to a hospitals file read beforehand.
inline Problem read_problem_csv(const std::string& hospitals_path,
                                const std::string& preferences_path) {
    Problem p;
    p.hospitals = read_hospitals_csv(hospitals_path);
    for (const auto& [number, line] : detail::read_lines(preferences_path)) {
        auto fields = detail::split_csv(line);
        if (fields.size() < 4)
            throw IoError(preferences_path, number,
                          "expected unit_id,kind,member_ids,rank1,...");
        if (fields[0] == "unit_id") continue;
        DecisionUnit unit;
        unit.id = detail::trim(fields[0]);
        std::string kind = detail::trim(fields[1]);
        if (kind == "single")
            unit.kind = UnitKind::Single;
        else if (kind == "couple")
            unit.kind = UnitKind::Couple;
        else
            throw IoError(preferences_path, number, "kind must be 'single' or 'couple'");
        std::istringstream members(fields[2]);
        std::string member;
        while (std::getline(members, member, ';'))
            unit.members.push_back(detail::trim(member));
        for (std::size_t f = 3; f < fields.size(); ++f) {
            int h = p.hospital_index(detail::trim(fields[f]));
            if (h < 0)
                throw IoError(preferences_path, number,
                              "unknown hospital '" + detail::trim(fields[f]) + "'");
            unit.ranking.push_back(h);
        }
        p.units.push_back(std::move(unit));
    }
    p.build_index();
    return p;
}

inline void write_preferences_csv(const std::string& path, const Problem& p,
                                  const std::string& header_comment = "") {
    std::ofstream out(path);
    if (!out) throw IoError(path, 0, "cannot open file for writing");
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    for (const DecisionUnit& u : p.units) {
        out << u.id << "," << (u.kind == UnitKind::Couple ? "couple" : "single") << ",";
        for (std::size_t i = 0; i < u.members.size(); ++i)
            out << (i ? ";" : "") << u.members[i];
        for (int h : u.ranking) out << "," << p.hospitals[h].id;
        out << "\n";
    }
}

inline Matrix read_matrix_csv(const std::string& path, const Problem& p) {
    auto lines = detail::read_lines(path);
    if (lines.empty()) throw IoError(path, 0, "empty matrix file");
    auto header = detail::split_csv(lines.front().second);
    if (static_cast<int>(header.size()) != p.num_hospitals() + 1)
        throw IoError(path, lines.front().first, "header column count mismatch");
    std::vector<int> col_to_hospital(p.num_hospitals());
    for (int c = 0; c < p.num_hospitals(); ++c) {
        int h = p.hospital_index(detail::trim(header[c + 1]));
        if (h < 0)
            throw IoError(path, lines.front().first,
                          "unknown hospital '" + detail::trim(header[c + 1]) + "' in header");
        col_to_hospital[c] = h;
    }
    Matrix m(p.num_interns(), p.num_hospitals());
    std::vector<char> seen(p.num_interns(), 0);
    for (std::size_t row = 1; row < lines.size(); ++row) {
        auto fields = detail::split_csv(lines[row].second);
        if (static_cast<int>(fields.size()) != p.num_hospitals() + 1)
            throw IoError(path, lines[row].first, "column count mismatch");
        std::string id = detail::trim(fields[0]);
        int intern = -1;
        for (int i = 0; i < p.num_interns(); ++i)
            if (p.intern_ids[i] == id) intern = i;
        if (intern < 0) throw IoError(path, lines[row].first, "unknown intern '" + id + "'");
        if (seen[intern]) throw IoError(path, lines[row].first, "duplicate intern row");
        seen[intern] = 1;
        for (int c = 0; c < p.num_hospitals(); ++c) {
            try {
                m.at(intern, col_to_hospital[c]) = std::stod(fields[c + 1]);
            } catch (const std::exception&) {
                throw IoError(path, lines[row].first, "entry is not a number");
            }
        }
    }
    for (int i = 0; i < p.num_interns(); ++i)
        if (!seen[i]) throw IoError(path, 0, "missing row for intern " + p.intern_ids[i]);
    return m;
}

inline void write_matrix_csv(const std::string& path, const Problem& p, const Matrix& m,
                             const std::string& header_comment = "") {
    std::ofstream out(path);
    if (!out) throw IoError(path, 0, "cannot open file for writing");
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out.precision(17);
    out << "intern_id";
    for (const Hospital& h : p.hospitals) out << "," << h.id;
    out << "\n";
    for (int i = 0; i < p.num_interns(); ++i) {
        out << p.intern_ids[i];
        for (int h = 0; h < p.num_hospitals(); ++h) out << "," << m.at(i, h);
        out << "\n";
    }
}

inline nlohmann::json combination_to_json(const Problem& p, const ConvexCombination& c) {
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json assignments = nlohmann::json::array();
    for (const WeightedAssignment& wa : c) {
        weights.push_back(wa.weight);
        nlohmann::json a = nlohmann::json::object();
        for (int i = 0; i < p.num_interns(); ++i)
            a[p.intern_ids[i]] = p.hospitals[wa.assignment.hospital_of[i]].id;
        assignments.push_back(std::move(a));
    }
    return nlohmann::json{{"weights", std::move(weights)}, {"assignments", std::move(assignments)}};
}

inline ConvexCombination combination_from_json(const Problem& p, const nlohmann::json& j) {
    ConvexCombination c;
    const auto& weights = j.at("weights");
    const auto& assignments = j.at("assignments");
    if (weights.size() != assignments.size())
        throw std::invalid_argument("decomposition JSON: weights/assignments size mismatch");
    for (std::size_t k = 0; k < weights.size(); ++k) {
        WeightedAssignment wa;
        wa.weight = weights[k].get<double>();
        wa.assignment.hospital_of.assign(p.num_interns(), -1);
        for (int i = 0; i < p.num_interns(); ++i) {
            std::string hid = assignments[k].at(p.intern_ids[i]).get<std::string>();
            int h = p.hospital_index(hid);
            if (h < 0) throw std::invalid_argument("decomposition JSON: unknown hospital " + hid);
            wa.assignment.hospital_of[i] = h;
        }
        c.push_back(std::move(wa));
    }
    return c;
}

inline void write_combination_json(const std::string& path, const Problem& p,
                                   const ConvexCombination& c, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw IoError(path, 0, "cannot open file for writing");
    nlohmann::json j = combination_to_json(p, c);
    j["seed"] = seed;
    out << j.dump(2) << "\n";
}

// Area map CSV: hospital_id,area. Returns area index per hospital; area
// names map to indices in order of first appearance.
inline std::vector<int> read_area_map_csv(const std::string& path, const Problem& p,
                                          std::vector<std::string>* area_names = nullptr) {
    std::vector<int> map(p.num_hospitals(), -1);
    std::vector<std::string> names;
    for (const auto& [number, line] : detail::read_lines(path)) {
        auto fields = detail::split_csv(line);
        if (fields.size() != 2) throw IoError(path, number, "expected hospital_id,area");
        if (fields[0] == "hospital_id") continue;
        int h = p.hospital_index(detail::trim(fields[0]));
        if (h < 0)
            throw IoError(path, number, "unknown hospital '" + detail::trim(fields[0]) + "'");
        std::string area = detail::trim(fields[1]);
        int idx = -1;
        for (std::size_t a = 0; a < names.size(); ++a)
            if (names[a] == area) idx = static_cast<int>(a);
        if (idx < 0) {
            idx = static_cast<int>(names.size());
            names.push_back(area);
        }
        map[h] = idx;
    }
    for (int h = 0; h < p.num_hospitals(); ++h)
        if (map[h] < 0) throw IoError(path, 0, "unmapped hospital " + p.hospitals[h].id);
    if (area_names) *area_names = names;
    return map;
}

// Edge-list text format: one "u v" pair per line, 0-indexed vertices.
inline CubicGraph read_graph_edge_list(const std::string& path) {
    CubicGraph g;
    for (const auto& [number, line] : detail::read_lines(path)) {
        std::istringstream in(line);
        int u = -1, v = -1;
        if (!(in >> u >> v)) throw IoError(path, number, "expected 'u v'");
        g.edges.push_back({u, v});
        g.num_vertices = std::max({g.num_vertices, u + 1, v + 1});
    }
    return g;
}

}  // namespace intern_match
