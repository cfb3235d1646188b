#ifndef SOSM_MATRIX_HPP
#define SOSM_MATRIX_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sosm/model.hpp"

namespace sosm {

using CellKey = std::pair<SystemId, SystemId>;

/// N-squared coupling matrix: systems on the diagonal, exchange instances in
/// the off-diagonal cells. Row is the source, column is the target.
class CouplingMatrix {
public:
    CouplingMatrix() = default;
    CouplingMatrix(std::vector<SystemId> order, std::map<CellKey, std::vector<Exchange>> cells)
        : order_(std::move(order)), cells_(std::move(cells)) {}

    const std::vector<SystemId>& order() const noexcept { return order_; }
    const std::map<CellKey, std::vector<Exchange>>& cells() const noexcept { return cells_; }
    std::size_t size() const noexcept { return order_.size(); }

    bool contains(SystemId id) const { return std::find(order_.begin(), order_.end(), id) != order_.end(); }

    /// Exchanges in cell (from, to); empty span when the cell is empty.
    std::span<const Exchange> cell(SystemId from, SystemId to) const {
        auto it = cells_.find({from, to});
        if (it == cells_.end()) return {};
        return it->second;
    }

    bool has_cell(SystemId from, SystemId to) const { return cells_.count({from, to}) != 0; }

    /// Targets of the non-empty cells in `from`'s row, ascending.
    std::vector<SystemId> successors(SystemId from) const {
        std::vector<SystemId> out;
        for (auto it = cells_.lower_bound({from, std::numeric_limits<SystemId>::min()});
             it != cells_.end() && it->first.first == from; ++it)
            out.push_back(it->first.second);
        return out;
    }

    std::size_t instance_count() const {
        std::size_t n = 0;
        for (const auto& [k, v] : cells_) n += v.size();
        return n;
    }

    friend bool operator==(const CouplingMatrix&, const CouplingMatrix&) = default;

private:
    std::vector<SystemId> order_;
    std::map<CellKey, std::vector<Exchange>> cells_;
};

inline CouplingMatrix build_matrix(const SosModel& model) {
    std::map<CellKey, std::vector<Exchange>> cells;
    for (const auto& e : model.exchanges) cells[{e.from, e.to}].push_back(e);
    // labels are unique within a cell; sorting makes cells independent of declaration order
    for (auto& [key, xs] : cells)
        std::sort(xs.begin(), xs.end(), [](const Exchange& a, const Exchange& b) { return a.label < b.label; });
    return CouplingMatrix(model.system_ids(), std::move(cells));
}

inline CouplingMatrix permute(const CouplingMatrix& m, std::vector<SystemId> new_order) {
    auto a = m.order();
    auto b = new_order;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw QueryError("new order is not a permutation of the matrix systems");
    return CouplingMatrix(std::move(new_order), m.cells());
}

/// Fraction of the n(n-1) off-diagonal cells that are non-empty.
inline double density(const CouplingMatrix& m) {
    const auto n = m.size();
    if (n < 2) throw QueryError("density is undefined for fewer than two systems");
    return static_cast<double>(m.cells().size()) / static_cast<double>(n * (n - 1));
}

struct SourcesAndSinks {
    std::set<SystemId> sources; // empty column: no input from another system
    std::set<SystemId> sinks;   // empty row: no output to another system
};

inline SourcesAndSinks sources_and_sinks(const CouplingMatrix& m) {
    SourcesAndSinks r;
    r.sources.insert(m.order().begin(), m.order().end());
    r.sinks = r.sources;
    for (const auto& [key, _] : m.cells()) {
        r.sinks.erase(key.first);
        r.sources.erase(key.second);
    }
    return r;
}

enum class MatrixFormat { text, csv };

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string join_labels(std::span<const Exchange> xs, std::string_view sep, bool brackets) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += brackets ? "[" + xs[i].label + "]" : xs[i].label;
    }
    return out;
}

} // namespace detail

/// Renders the matrix in its current order.
///
/// `text` is an aligned grid with a header of target ids, the system id on
/// the diagonal and `[a],[b]` labels in the cells. `csv` has a header row
/// of target ids, one row per source, `;`-joined labels in the cells and
/// the system id on the diagonal.
inline std::string render(const CouplingMatrix& m, MatrixFormat format) {
    const auto& order = m.order();
    auto cell_text = [&](SystemId r, SystemId c) {
        if (r == c) return std::to_string(r);
        return format == MatrixFormat::text ? detail::join_labels(m.cell(r, c), ",", true)
                                            : detail::join_labels(m.cell(r, c), ";", false);
    };

    std::ostringstream os;
    if (format == MatrixFormat::csv) {
        os << "from/to";
        for (auto c : order) os << ',' << c;
        os << '\n';
        for (auto r : order) {
            os << r;
            for (auto c : order) os << ',' << detail::csv_field(cell_text(r, c));
            os << '\n';
        }
        return os.str();
    }

    std::vector<std::size_t> width(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        width[j] = std::to_string(order[j]).size();
        for (auto r : order) width[j] = std::max(width[j], cell_text(r, order[j]).size());
    }
    auto emit_row = [&](auto&& text_of) {
        std::string line;
        for (std::size_t j = 0; j < order.size(); ++j) {
            std::string t = text_of(j);
            line += (j ? " | " : "") + t + std::string(width[j] - t.size(), ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        os << line << '\n';
    };
    if (order.empty()) return {};
    emit_row([&](std::size_t j) { return std::to_string(order[j]); });
    {
        std::string rule;
        for (std::size_t j = 0; j < order.size(); ++j) rule += (j ? "-+-" : "") + std::string(width[j], '-');
        os << rule << '\n';
    }
    for (auto r : order) emit_row([&](std::size_t j) { return cell_text(r, order[j]); });
    return os.str();
}

} // namespace sosm

#endif
