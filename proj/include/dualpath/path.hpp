#ifndef DUALPATH_PATH_HPP
#define DUALPATH_PATH_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"

namespace dualpath
{

/// A read/write path as the number of source tokens read before each target
/// token is written. `values()[i]` is g for target position i+1; every value
/// lies in [1, source_len()] and the sequence never decreases.
class GSequence
{
public:
    GSequence(std::vector<int> values, int source_len)
        : values_(std::move(values))
        , source_len_(source_len)
    {
        if (source_len_ < 1)
            throw InvalidInput("g-sequence: source length must be at least 1");
        if (values_.empty())
            throw InvalidInput("g-sequence: target length must be at least 1");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const int v = values_[i];
            if (v < 1 || v > source_len_)
                throw InvalidInput("g-sequence: g[" + std::to_string(i + 1) + "] = " + std::to_string(v) +
                                   " outside [1, " + std::to_string(source_len_) + "]");
            if (i > 0 && v < values_[i - 1])
                throw InvalidInput("g-sequence: decreases at position " + std::to_string(i + 1));
        }
    }

    std::span<const int> values() const noexcept { return values_; }
    int source_len() const noexcept { return source_len_; }
    int target_len() const noexcept { return static_cast<int>(values_.size()); }

    /// g for a 1-based target position.
    int at(int position) const { return values_.at(static_cast<std::size_t>(position - 1)); }

    /// True when the path has consumed the whole source by its last WRITE.
    bool complete() const noexcept { return values_.back() == source_len_; }

    friend bool operator==(const GSequence&, const GSequence&) = default;

private:
    std::vector<int> values_;
    int source_len_;
};

enum class Action : std::uint8_t { read, write };

/// Raw action trace with declared lengths. May be invalid; see validate_path.
struct ActionSequence
{
    std::vector<Action> actions;
    int source_len = 0;
    int target_len = 0;

    friend bool operator==(const ActionSequence&, const ActionSequence&) = default;
};

struct ValidationReport
{
    std::vector<std::string> violations;

    bool valid() const noexcept { return violations.empty(); }
};

/// Prefix-coverage encoding: cell (i, j) is 1 iff source j+1 was read when
/// target i+1 was written.
using CoverageMatrix = Matrix<std::uint8_t>;

inline std::string to_string(const ActionSequence& a)
{
    std::string s;
    s.reserve(a.actions.size());
    for (Action act : a.actions)
        s.push_back(act == Action::read ? 'R' : 'W');
    return s;
}

/// Parses an action string over {R, W} with lengths declared by the caller.
inline ActionSequence parse_actions(std::string_view text, int target_len, int source_len)
{
    ActionSequence a;
    a.source_len = source_len;
    a.target_len = target_len;
    a.actions.reserve(text.size());
    for (std::size_t k = 0; k < text.size(); ++k) {
        switch (text[k]) {
        case 'R': a.actions.push_back(Action::read); break;
        case 'W': a.actions.push_back(Action::write); break;
        default:
            throw ParseError("invalid action character '" + std::string(1, text[k]) + "' at column " +
                             std::to_string(k + 1));
        }
    }
    return a;
}

/// Parses an action string and takes the lengths from the READ/WRITE counts.
inline ActionSequence parse_actions(std::string_view text)
{
    ActionSequence a = parse_actions(text, 0, 0);
    for (Action act : a.actions)
        ++(act == Action::read ? a.source_len : a.target_len);
    return a;
}

inline ValidationReport validate_path(const ActionSequence& a)
{
    ValidationReport report;
    auto& out = report.violations;
    if (a.source_len < 1)
        out.push_back("source length must be at least 1");
    if (a.target_len < 1)
        out.push_back("target length must be at least 1");

    int reads = 0;
    int writes = 0;
    bool premature_write = false;
    for (std::size_t k = 0; k < a.actions.size(); ++k) {
        if (a.actions[k] == Action::read) {
            ++reads;
        } else {
            ++writes;
            if (reads == 0 && !premature_write) {
                premature_write = true;
                out.push_back("WRITE at action " + std::to_string(k + 1) + " before any READ");
            }
        }
    }
    if (reads != a.source_len)
        out.push_back("READ count " + std::to_string(reads) + " does not match source length " +
                      std::to_string(a.source_len));
    if (writes != a.target_len)
        out.push_back("WRITE count " + std::to_string(writes) + " does not match target length " +
                      std::to_string(a.target_len));
    return report;
}

inline GSequence actions_to_g(const ActionSequence& a)
{
    const ValidationReport report = validate_path(a);
    if (!report.valid())
        throw InvalidInput("action sequence: " + report.violations.front());

    std::vector<int> g;
    g.reserve(static_cast<std::size_t>(a.target_len));
    int reads = 0;
    for (Action act : a.actions) {
        if (act == Action::read)
            ++reads;
        else
            g.push_back(reads);
    }
    return GSequence(std::move(g), a.source_len);
}

/// Emits READs up to each g value, then a WRITE. Source tokens never reached
/// by a WRITE are read at the end, so the path always ends at (I, J).
inline ActionSequence g_to_actions(const GSequence& g)
{
    ActionSequence a;
    a.source_len = g.source_len();
    a.target_len = g.target_len();
    a.actions.reserve(static_cast<std::size_t>(a.source_len + a.target_len));
    int reads = 0;
    for (int v : g.values()) {
        for (; reads < v; ++reads)
            a.actions.push_back(Action::read);
        a.actions.push_back(Action::write);
    }
    for (; reads < a.source_len; ++reads)
        a.actions.push_back(Action::read);
    return a;
}

inline CoverageMatrix coverage_matrix(const GSequence& g)
{
    CoverageMatrix m(static_cast<std::size_t>(g.target_len()), static_cast<std::size_t>(g.source_len()), 0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(g.values()[i]); ++j)
            m(i, j) = 1;
    return m;
}

} // namespace dualpath

#endif // DUALPATH_PATH_HPP
