#ifndef DUALPATH_POLICIES_HPP
#define DUALPATH_POLICIES_HPP

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "metrics.hpp"
#include "path.hpp"
#include "transpose.hpp"

namespace dualpath
{

enum class PolicyKind { wait_k, oracle_alignment, replay };

struct PolicySpec
{
    PolicyKind kind = PolicyKind::wait_k;
    int k = 1; ///< wait_k only

    void validate() const
    {
        if (kind == PolicyKind::wait_k && k < 1)
            throw InvalidInput("wait_k policy: k must be at least 1, got " + std::to_string(k));
    }
};

inline PolicyKind parse_policy_kind(std::string_view name)
{
    if (name == "wait_k" || name == "wait-k")
        return PolicyKind::wait_k;
    if (name == "oracle_alignment" || name == "oracle")
        return PolicyKind::oracle_alignment;
    if (name == "replay")
        return PolicyKind::replay;
    throw InvalidInput("unknown policy '" + std::string(name) + "'");
}

inline std::string_view to_string(PolicyKind kind)
{
    switch (kind) {
    case PolicyKind::wait_k: return "wait_k";
    case PolicyKind::oracle_alignment: return "oracle_alignment";
    case PolicyKind::replay: return "replay";
    }
    return "unknown";
}

/// Read k source tokens, then alternate WRITE and READ until the source runs out.
inline GSequence wait_k_path(int k, int target_len, int source_len)
{
    if (k < 1 || target_len < 1 || source_len < 1)
        throw InvalidInput("wait_k_path: k, target length and source length must all be positive");
    std::vector<int> g(static_cast<std::size_t>(target_len));
    for (int i = 0; i < target_len; ++i)
        g[static_cast<std::size_t>(i)] = std::min(k + i, source_len);
    return GSequence(std::move(g), source_len);
}

/// Writes each target word as soon as its aligned source word (and every
/// earlier one) has been read. Unaligned words inherit the previous position;
/// a leading unaligned word waits for one source token.
inline GSequence oracle_path_from_alignment(const OraclePositions& a)
{
    if (a.target_len() < 1)
        throw InvalidInput("oracle_path_from_alignment: empty target");
    std::vector<int> g;
    g.reserve(a.positions().size());
    int running = 1;
    for (const auto& p : a.positions()) {
        if (p)
            running = std::max(running, *p);
        g.push_back(running);
    }
    return GSequence(std::move(g), a.source_len());
}

/// Test fixture: each row puts `sharpness` on its write position and spreads
/// the rest evenly, so the row argmax recovers g whenever sharpness > 1/J.
inline WritingProbabilityMatrix synthetic_alpha(const GSequence& g, double sharpness)
{
    const int cols = g.source_len();
    if (!(sharpness > 0.0 && sharpness <= 1.0))
        throw InvalidInput("synthetic_alpha: sharpness must lie in (0, 1]");
    if (cols > 1 && !(sharpness > 1.0 / cols))
        throw InvalidInput("synthetic_alpha: sharpness must exceed 1/J = " + std::to_string(1.0 / cols) +
                           " or the argmax is ambiguous");
    const double rest = cols > 1 ? (1.0 - sharpness) / (cols - 1) : 0.0;
    const double peak = cols > 1 ? sharpness : 1.0;
    Matrix<double> m(static_cast<std::size_t>(g.target_len()), static_cast<std::size_t>(cols), rest);
    for (std::size_t i = 0; i < m.rows(); ++i)
        m(i, static_cast<std::size_t>(g.values()[i] - 1)) = peak;
    return WritingProbabilityMatrix(std::move(m));
}

} // namespace dualpath

#endif // DUALPATH_POLICIES_HPP
