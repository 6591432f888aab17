#ifndef DUALPATH_METRICS_HPP
#define DUALPATH_METRICS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "path.hpp"
#include "transpose.hpp"

namespace dualpath
{

/// Aligned source position for each target word, or nullopt when the word has
/// no alignment. With several aligned source words the furthest one is used.
class OraclePositions
{
public:
    OraclePositions(std::vector<std::optional<int>> positions, int source_len)
        : positions_(std::move(positions))
        , source_len_(source_len)
    {
        if (source_len_ < 1)
            throw InvalidInput("oracle positions: source length must be at least 1");
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            const auto& p = positions_[i];
            if (p && (*p < 1 || *p > source_len_))
                throw InvalidInput("oracle positions: a[" + std::to_string(i + 1) + "] = " + std::to_string(*p) +
                                   " outside [1, " + std::to_string(source_len_) + "]");
        }
    }

    const std::vector<std::optional<int>>& positions() const noexcept { return positions_; }
    int source_len() const noexcept { return source_len_; }
    int target_len() const noexcept { return static_cast<int>(positions_.size()); }

    std::size_t aligned_count() const noexcept
    {
        return static_cast<std::size_t>(
            std::count_if(positions_.begin(), positions_.end(), [](const auto& p) { return p.has_value(); }));
    }

    friend bool operator==(const OraclePositions&, const OraclePositions&) = default;

private:
    std::vector<std::optional<int>> positions_;
    int source_len_;
};

/// Average lagging over the prefix up to the first WRITE issued after the
/// whole source was read (the last target when that never happens).
inline double average_lagging(const GSequence& g)
{
    const auto v = g.values();
    const double rate = static_cast<double>(g.target_len()) / g.source_len();
    std::size_t tau = v.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == g.source_len()) {
            tau = i + 1;
            break;
        }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < tau; ++i)
        sum += v[i] - static_cast<double>(i) / rate;
    return sum / static_cast<double>(tau);
}

inline double average_proportion(const GSequence& g)
{
    double sum = 0.0;
    for (int v : g.values())
        sum += v;
    return sum / (static_cast<double>(g.source_len()) * g.target_len());
}

inline double differentiable_average_lagging(const GSequence& g)
{
    const auto v = g.values();
    const double rate = static_cast<double>(g.target_len()) / g.source_len();
    double delayed = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        delayed = i == 0 ? v[0] : std::max<double>(v[i], delayed + 1.0 / rate);
        sum += delayed - static_cast<double>(i) / rate;
    }
    return sum / static_cast<double>(v.size());
}

namespace detail
{
inline void require_matching(const GSequence& g, const OraclePositions& a, const char* what)
{
    if (g.target_len() != a.target_len() || g.source_len() != a.source_len())
        throw DimensionError(std::string(what) + ": path covers " + std::to_string(g.target_len()) + " targets over " +
                             std::to_string(g.source_len()) + " sources, alignment covers " +
                             std::to_string(a.target_len()) + " over " + std::to_string(a.source_len()));
}
} // namespace detail

/// Fraction of aligned target words whose aligned source word was read before
/// they were written. Unaligned target words are skipped.
inline double sufficiency(const GSequence& g, const OraclePositions& a)
{
    detail::require_matching(g, a, "sufficiency");
    std::size_t aligned = 0;
    std::size_t covered = 0;
    for (std::size_t i = 0; i < a.positions().size(); ++i) {
        if (const auto& p = a.positions()[i]) {
            ++aligned;
            covered += *p <= g.values()[i];
        }
    }
    if (aligned == 0)
        throw InvalidInput("sufficiency: no aligned target words");
    return static_cast<double>(covered) / static_cast<double>(aligned);
}

/// Mean of a_i / g_i over target words with a_i <= g_i. 1 means every such
/// word was written right at its aligned position.
inline double necessity(const GSequence& g, const OraclePositions& a)
{
    detail::require_matching(g, a, "necessity");
    std::size_t qualifying = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.positions().size(); ++i) {
        const auto& p = a.positions()[i];
        if (p && *p <= g.values()[i]) {
            ++qualifying;
            sum += static_cast<double>(*p) / g.values()[i];
        }
    }
    if (qualifying == 0)
        throw InvalidInput("necessity: no target word is written after its aligned source word");
    return sum / static_cast<double>(qualifying);
}

/// Intersection over union of two equally shaped binary matrices.
inline double binary_iou(const Matrix<std::uint8_t>& p, const Matrix<std::uint8_t>& q)
{
    if (!p.same_shape(q))
        throw DimensionError("binary_iou: matrices differ in shape");
    std::size_t inter = 0;
    std::size_t uni = 0;
    const auto pv = p.values();
    const auto qv = q.values();
    for (std::size_t k = 0; k < pv.size(); ++k) {
        inter += (pv[k] && qv[k]);
        uni += (pv[k] || qv[k]);
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Duality of a forward path (I targets over J sources) and a backward path
/// (J targets over I sources): IoU of the areas below the forward path and
/// below the transposed backward path. On prefix coverage this reduces to
/// sum(min) / sum(max) of the two g-sequences.
inline double iou_duality(const GSequence& g_fwd, const GSequence& g_bwd)
{
    if (g_bwd.target_len() != g_fwd.source_len() || g_bwd.source_len() != g_fwd.target_len())
        throw DimensionError("iou_duality: forward path is " + std::to_string(g_fwd.target_len()) + "x" +
                             std::to_string(g_fwd.source_len()) + " but backward path is " +
                             std::to_string(g_bwd.target_len()) + "x" + std::to_string(g_bwd.source_len()));
    const GSequence tg = transpose_g(g_bwd);
    long inter = 0;
    long uni = 0;
    for (std::size_t i = 0; i < g_fwd.values().size(); ++i) {
        inter += std::min(g_fwd.values()[i], tg.values()[i]);
        uni += std::max(g_fwd.values()[i], tg.values()[i]);
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

struct MetricReport
{
    double al = 0.0;
    double ap = 0.0;
    double dal = 0.0;
    std::optional<double> a_suf;
    std::optional<double> a_nec;
    std::size_t aligned_count = 0;    ///< denominator of a_suf
    std::size_t qualifying_count = 0; ///< denominator of a_nec
};

/// All single-path metrics. Alignment metrics are left empty when no alignment
/// is given or their denominator is zero.
inline MetricReport evaluate_path(const GSequence& g, const OraclePositions* alignment = nullptr)
{
    MetricReport r;
    r.al = average_lagging(g);
    r.ap = average_proportion(g);
    r.dal = differentiable_average_lagging(g);
    if (!alignment)
        return r;

    detail::require_matching(g, *alignment, "evaluate_path");
    for (std::size_t i = 0; i < alignment->positions().size(); ++i) {
        const auto& p = alignment->positions()[i];
        if (!p)
            continue;
        ++r.aligned_count;
        r.qualifying_count += *p <= g.values()[i];
    }
    if (r.aligned_count > 0)
        r.a_suf = sufficiency(g, *alignment);
    if (r.qualifying_count > 0)
        r.a_nec = necessity(g, *alignment);
    return r;
}

} // namespace dualpath

#endif // DUALPATH_METRICS_HPP
