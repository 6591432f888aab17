#ifndef DUALPATH_TRANSPOSE_HPP
#define DUALPATH_TRANSPOSE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "path.hpp"

namespace dualpath
{

/// Expected writing probabilities: rows are target positions, columns are
/// source positions. Entries are finite and nonnegative and every row has a
/// positive entry. Rows need not be normalized; only their argmax is used.
class WritingProbabilityMatrix
{
public:
    explicit WritingProbabilityMatrix(Matrix<double> scores)
        : scores_(std::move(scores))
    {
        if (scores_.empty())
            throw InvalidInput("writing probability matrix is empty");
        for (std::size_t i = 0; i < scores_.rows(); ++i) {
            bool positive = false;
            for (double v : scores_.row(i)) {
                if (!std::isfinite(v) || v < 0.0)
                    throw InvalidInput("writing probability matrix: row " + std::to_string(i + 1) +
                                       " has a negative or non-finite entry");
                positive = positive || v > 0.0;
            }
            if (!positive)
                throw InvalidInput("writing probability matrix: row " + std::to_string(i + 1) + " is all zeros");
        }
    }

    const Matrix<double>& scores() const noexcept { return scores_; }
    int target_len() const noexcept { return static_cast<int>(scores_.rows()); }
    int source_len() const noexcept { return static_cast<int>(scores_.cols()); }
    double operator()(std::size_t r, std::size_t c) const { return scores_(r, c); }

private:
    Matrix<double> scores_;
};

/// One-hot WRITE events of a path: row r has a single 1 at column g_r.
/// Stored compactly as the g-sequence it encodes.
class GammaMatrix
{
public:
    explicit GammaMatrix(GSequence writes)
        : writes_(std::move(writes))
    {
    }

    int rows() const noexcept { return writes_.target_len(); }
    int cols() const noexcept { return writes_.source_len(); }

    /// 0-based element access, matching Matrix.
    double operator()(std::size_t r, std::size_t c) const
    {
        return writes_.values()[r] == static_cast<int>(c) + 1 ? 1.0 : 0.0;
    }

    const GSequence& writes() const noexcept { return writes_; }

    Matrix<double> dense() const
    {
        Matrix<double> m(static_cast<std::size_t>(rows()), static_cast<std::size_t>(cols()), 0.0);
        for (std::size_t r = 0; r < m.rows(); ++r)
            m(r, static_cast<std::size_t>(writes_.values()[r] - 1)) = 1.0;
        return m;
    }

    /// 1-based (row, column) coordinates of every 1, in row order.
    std::vector<std::pair<int, int>> ones() const
    {
        std::vector<std::pair<int, int>> out;
        for (int r = 1; r <= rows(); ++r)
            out.emplace_back(r, writes_.at(r));
        return out;
    }

    friend bool operator==(const GammaMatrix&, const GammaMatrix&) = default;

private:
    GSequence writes_;
};

/// Spans are 1-based and inclusive.
struct SegmentPair
{
    int src_begin;
    int src_end;
    int tgt_begin;
    int tgt_end;

    friend bool operator==(const SegmentPair&, const SegmentPair&) = default;
};

/// Ordered segment pairs whose source spans partition 1..source_len and whose
/// target spans partition 1..target_len, both contiguously and in order.
class SegmentPairSequence
{
public:
    SegmentPairSequence(std::vector<SegmentPair> pairs, int source_len, int target_len)
        : pairs_(std::move(pairs))
        , source_len_(source_len)
        , target_len_(target_len)
    {
        if (pairs_.empty())
            throw InvalidInput("segment pairs: sequence is empty");
        int next_src = 1;
        int next_tgt = 1;
        for (std::size_t k = 0; k < pairs_.size(); ++k) {
            const SegmentPair& p = pairs_[k];
            const std::string where = "segment pair " + std::to_string(k + 1);
            if (p.src_begin > p.src_end || p.tgt_begin > p.tgt_end)
                throw InvalidInput(where + " has an empty span");
            if (p.src_begin != next_src || p.tgt_begin != next_tgt)
                throw InvalidInput(where + " overlaps or leaves a gap after its predecessor");
            next_src = p.src_end + 1;
            next_tgt = p.tgt_end + 1;
        }
        if (next_src != source_len_ + 1 || next_tgt != target_len_ + 1)
            throw InvalidInput("segment pairs do not cover the whole sentence pair");
    }

    std::span<const SegmentPair> pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    const SegmentPair& operator[](std::size_t k) const { return pairs_[k]; }
    int source_len() const noexcept { return source_len_; }
    int target_len() const noexcept { return target_len_; }

    friend bool operator==(const SegmentPairSequence&, const SegmentPairSequence&) = default;

private:
    std::vector<SegmentPair> pairs_;
    int source_len_;
    int target_len_;
};

enum class Monotonicity
{
    repair, ///< replace a non-monotone argmax sequence by its running maximum
    strict  ///< throw ConsistencyError instead
};

struct WritePositions
{
    std::vector<int> d;
    bool monotonized = false;
};

/// Source position each target WRITE corresponds to: the row argmax of alpha
/// (leftmost on ties), made monotone by a running maximum.
inline WritePositions write_positions(const WritingProbabilityMatrix& alpha,
                                      Monotonicity mode = Monotonicity::repair)
{
    const Matrix<double>& m = alpha.scores();
    WritePositions out;
    out.d.reserve(m.rows());
    int running = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < row.size(); ++j)
            if (row[j] > row[best])
                best = j;
        const int pos = static_cast<int>(best) + 1;
        if (pos < running) {
            if (mode == Monotonicity::strict)
                throw ConsistencyError("argmax of row " + std::to_string(i + 1) + " (" + std::to_string(pos) +
                                       ") precedes the previous write position (" + std::to_string(running) + ")");
            out.monotonized = true;
        } else {
            running = pos;
        }
        out.d.push_back(running);
    }
    return out;
}

/// Groups maximal runs of equal write positions into target segments and pairs
/// each with the source tokens read since the previous segment. Source tokens
/// after the last write position join the final pair.
inline SegmentPairSequence segment(std::span<const int> d, int source_len)
{
    if (d.empty())
        throw InvalidInput("segment: no write positions");
    std::vector<SegmentPair> pairs;
    int prev = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int v = d[i];
        if (v < 1 || v > source_len)
            throw InvalidInput("segment: write position " + std::to_string(v) + " at target " +
                               std::to_string(i + 1) + " outside [1, " + std::to_string(source_len) + "]");
        if (v < prev)
            throw InvalidInput("segment: write positions decrease at target " + std::to_string(i + 1));
        const int tgt = static_cast<int>(i) + 1;
        if (v != prev)
            pairs.push_back({prev + 1, v, tgt, tgt});
        else
            pairs.back().tgt_end = tgt;
        prev = v;
    }
    pairs.back().src_end = source_len;
    return SegmentPairSequence(std::move(pairs), source_len, static_cast<int>(d.size()));
}

/// Swaps the source and target span of every pair, keeping their order.
inline SegmentPairSequence transpose_segments(const SegmentPairSequence& s)
{
    std::vector<SegmentPair> swapped;
    swapped.reserve(s.size());
    for (const SegmentPair& p : s.pairs())
        swapped.push_back({p.tgt_begin, p.tgt_end, p.src_begin, p.src_end});
    return SegmentPairSequence(std::move(swapped), s.target_len(), s.source_len());
}

struct MergeResult
{
    GammaMatrix gamma;
    GSequence g;
};

/// Every target position of a pair is written once the pair's whole source
/// span has been read, i.e. at the span's last column.
inline MergeResult merge_gamma(const SegmentPairSequence& t)
{
    std::vector<int> g;
    g.reserve(static_cast<std::size_t>(t.target_len()));
    for (const SegmentPair& p : t.pairs())
        g.insert(g.end(), static_cast<std::size_t>(p.tgt_end - p.tgt_begin + 1), p.src_end);
    GSequence seq(std::move(g), t.source_len());
    return {GammaMatrix(seq), seq};
}

/// Concatenated action segments: each pair contributes READs for its source
/// span followed by WRITEs for its target span.
inline ActionSequence segments_to_actions(const SegmentPairSequence& s)
{
    ActionSequence a;
    a.source_len = s.source_len();
    a.target_len = s.target_len();
    for (const SegmentPair& p : s.pairs()) {
        a.actions.insert(a.actions.end(), static_cast<std::size_t>(p.src_end - p.src_begin + 1), Action::read);
        a.actions.insert(a.actions.end(), static_cast<std::size_t>(p.tgt_end - p.tgt_begin + 1), Action::write);
    }
    return a;
}

struct TransposeResult
{
    SegmentPairSequence segments; ///< forward-direction pairs
    GammaMatrix gamma;            ///< reverse orientation: source rows x target columns
    GSequence g_back;             ///< reverse-direction path
    bool monotonized = false;
};

inline TransposeResult transpose_path(const WritingProbabilityMatrix& alpha, Monotonicity mode = Monotonicity::repair)
{
    WritePositions wp = write_positions(alpha, mode);
    SegmentPairSequence segments = segment(wp.d, alpha.source_len());
    MergeResult merged = merge_gamma(transpose_segments(segments));
    return {std::move(segments), std::move(merged.gamma), std::move(merged.g), wp.monotonized};
}

/// Transposes an explicit path. A path is its own write-position sequence.
inline TransposeResult transpose_path(const GSequence& g)
{
    SegmentPairSequence segments = segment(g.values(), g.source_len());
    MergeResult merged = merge_gamma(transpose_segments(segments));
    return {std::move(segments), std::move(merged.gamma), std::move(merged.g), false};
}

inline GSequence transpose_g(const GSequence& g) { return transpose_path(g).g_back; }

} // namespace dualpath

#endif // DUALPATH_TRANSPOSE_HPP
