#ifndef DUALPATH_IO_HPP
#define DUALPATH_IO_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "loss.hpp"
#include "matrix.hpp"
#include "metrics.hpp"
#include "path.hpp"

namespace dualpath
{

// ---------------------------------------------------------------------------
// Text helpers

/// Splits on LF. A trailing LF does not start another line; a CR before the LF
/// is dropped.
inline std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

inline std::vector<std::string> split_tokens(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t k = 0;
    while (k < text.size()) {
        while (k < text.size() && (text[k] == ' ' || text[k] == '\t'))
            ++k;
        std::size_t end = k;
        while (end < text.size() && text[end] != ' ' && text[end] != '\t')
            ++end;
        if (end > k)
            out.emplace_back(text.substr(k, end - k));
        k = end;
    }
    return out;
}

inline std::string read_text_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open '" + file.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& file, std::string_view text)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InvalidInput("cannot open '" + file.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_real(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Pharaoh alignments

/// Word alignment of one sentence pair: for every target position (1-based)
/// the sorted set of aligned source positions (1-based).
struct AlignmentMap
{
    std::vector<std::vector<int>> links;
    int source_len = 0;

    int target_len() const noexcept { return static_cast<int>(links.size()); }

    /// Furthest aligned source position per target word.
    OraclePositions oracle_positions() const
    {
        std::vector<std::optional<int>> a;
        a.reserve(links.size());
        for (const auto& set : links)
            a.push_back(set.empty() ? std::nullopt : std::optional<int>(set.back()));
        return OraclePositions(std::move(a), source_len);
    }
};

namespace detail
{
inline std::optional<int> parse_index(std::string_view s)
{
    int v = 0;
    if (s.empty())
        return std::nullopt;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}
} // namespace detail

/// Parses whitespace separated "s-t" pairs. Indices are `base`-based on input
/// (0 by default) and 1-based in the result.
inline AlignmentMap parse_pharaoh(std::string_view line, int target_len, int source_len, int base = 0)
{
    if (base != 0 && base != 1)
        throw InvalidInput("pharaoh: index base must be 0 or 1");
    if (target_len < 1 || source_len < 1)
        throw InvalidInput("pharaoh: sentence lengths must be positive");

    AlignmentMap map;
    map.source_len = source_len;
    map.links.resize(static_cast<std::size_t>(target_len));
    for (const std::string& token : split_tokens(line)) {
        const std::size_t dash = token.find('-');
        const auto s = dash == std::string::npos ? std::nullopt : detail::parse_index(std::string_view(token).substr(0, dash));
        const auto t = dash == std::string::npos ? std::nullopt : detail::parse_index(std::string_view(token).substr(dash + 1));
        if (!s || !t)
            throw ParseError("pharaoh: malformed alignment token '" + token + "'");
        if (*s < base || *t < base)
            throw ParseError("pharaoh: negative index in '" + token + "'");
        const int src = *s - base + 1;
        const int tgt = *t - base + 1;
        if (src > source_len || tgt > target_len)
            throw DimensionError("pharaoh: '" + token + "' exceeds sentence lengths (source " +
                                 std::to_string(source_len) + ", target " + std::to_string(target_len) + ")");
        map.links[static_cast<std::size_t>(tgt - 1)].push_back(src);
    }
    for (auto& set : map.links) {
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
    }
    return map;
}

// ---------------------------------------------------------------------------
// Corpus

struct SentencePairRecord
{
    int id = 0; ///< 1-based line number in the corpus file
    std::vector<std::string> src_tokens;
    std::vector<std::string> tgt_tokens;
    std::optional<AlignmentMap> alignment;
    std::map<std::string, GSequence> paths;
    std::map<std::string, Matrix<double>> matrices;

    int source_len() const noexcept { return static_cast<int>(src_tokens.size()); }
    int target_len() const noexcept { return static_cast<int>(tgt_tokens.size()); }
};

/// One sentence pair per line: source and target separated by a single tab,
/// each side split on spaces. Sub-word markers stay part of their token.
inline std::vector<SentencePairRecord> parse_corpus(std::string_view text)
{
    std::vector<SentencePairRecord> out;
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string_view line = lines[n];
        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
            throw ParseError("corpus: expected exactly one tab between source and target", n + 1);
        SentencePairRecord rec;
        rec.id = static_cast<int>(n + 1);
        rec.src_tokens = split_tokens(line.substr(0, tab));
        rec.tgt_tokens = split_tokens(line.substr(tab + 1));
        if (rec.src_tokens.empty() || rec.tgt_tokens.empty())
            throw ParseError("corpus: empty source or target sentence", n + 1);
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<SentencePairRecord> read_corpus_file(const std::filesystem::path& file)
{
    return parse_corpus(read_text_file(file));
}

/// One Pharaoh line per corpus record; an empty line means no alignment links.
/// Attaches the parsed alignment to each record.
inline void attach_alignments(std::vector<SentencePairRecord>& corpus, std::string_view text, int base = 0)
{
    const auto lines = split_lines(text);
    if (lines.size() != corpus.size())
        throw DimensionError("alignments: " + std::to_string(lines.size()) + " lines for " +
                             std::to_string(corpus.size()) + " corpus records");
    for (std::size_t n = 0; n < lines.size(); ++n) {
        SentencePairRecord& rec = corpus[n];
        try {
            rec.alignment = parse_pharaoh(lines[n], rec.target_len(), rec.source_len(), base);
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (record " + std::to_string(rec.id) + ")", n + 1);
        } catch (const DimensionError& e) {
            throw DimensionError("record " + std::to_string(rec.id) + ": " + e.what());
        }
    }
}

// ---------------------------------------------------------------------------
// Path files

enum class PathFormat
{
    actions, ///< "RRWWWRWWRRW"
    json     ///< {"g":[2,2,2,3,3,5],"J":5}
};

struct PathFile
{
    PathFormat format = PathFormat::actions;
    std::vector<GSequence> paths;
};

inline std::string format_path_line(const GSequence& g, PathFormat format)
{
    if (format == PathFormat::actions)
        return to_string(g_to_actions(g));
    std::string s = "{\"g\":[";
    for (std::size_t i = 0; i < g.values().size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(g.values()[i]);
    }
    s += "],\"J\":" + std::to_string(g.source_len()) + "}";
    return s;
}

inline GSequence parse_path_line(std::string_view line, PathFormat format)
{
    if (format == PathFormat::actions)
        return actions_to_g(parse_actions(line));

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("path: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("g") || !doc.contains("J") || !doc["g"].is_array() ||
        !doc["J"].is_number_integer())
        throw ParseError("path: expected an object with an integer array \"g\" and an integer \"J\"");
    std::vector<int> g;
    for (const auto& v : doc["g"]) {
        if (!v.is_number_integer())
            throw ParseError("path: g-values must be integers");
        g.push_back(v.get<int>());
    }
    return GSequence(std::move(g), doc["J"].get<int>());
}

inline PathFile parse_path_file(std::string_view text)
{
    PathFile file;
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string_view line = lines[n];
        const PathFormat format = !line.empty() && line.front() == '{' ? PathFormat::json : PathFormat::actions;
        if (n == 0)
            file.format = format;
        else if (format != file.format)
            throw ParseError("path file mixes action strings and JSON g-sequences", n + 1);
        try {
            file.paths.push_back(parse_path_line(line, format));
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (record " + std::to_string(n + 1) + ")", n + 1);
        } catch (const InvalidInput& e) {
            throw ParseError(std::string(e.what()) + " (record " + std::to_string(n + 1) + ")", n + 1);
        }
    }
    return file;
}

inline std::string format_path_file(const PathFile& file)
{
    std::string out;
    for (const GSequence& g : file.paths) {
        out += format_path_line(g, file.format);
        out += '\n';
    }
    return out;
}

inline PathFile read_path_file(const std::filesystem::path& file) { return parse_path_file(read_text_file(file)); }

inline void write_path_file(const std::filesystem::path& file, const PathFile& paths)
{
    write_text_file(file, format_path_file(paths));
}

// ---------------------------------------------------------------------------
// Matrix files

inline Matrix<double> matrix_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw ParseError("matrix: expected an object with rows, cols and data");
    for (const char* key : {"rows", "cols"})
        if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 1)
            throw ParseError(std::string("matrix: \"") + key + "\" must be a positive integer");
    if (!doc.contains("data") || !doc["data"].is_array())
        throw ParseError("matrix: \"data\" must be a list of rows");

    const auto rows = doc["rows"].get<std::size_t>();
    const auto cols = doc["cols"].get<std::size_t>();
    const auto& data = doc["data"];
    if (data.size() != rows)
        throw ParseError("matrix: data has " + std::to_string(data.size()) + " rows, expected " + std::to_string(rows));

    Matrix<double> m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = data[r];
        if (!row.is_array() || row.size() != cols)
            throw ParseError("matrix: row " + std::to_string(r + 1) + " has " +
                             std::to_string(row.is_array() ? row.size() : 0) + " entries, expected " +
                             std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row[c].is_number())
                throw ParseError("matrix: row " + std::to_string(r + 1) + " column " + std::to_string(c + 1) +
                                 " is not a number");
            const double v = row[c].get<double>();
            if (!std::isfinite(v))
                throw ParseError("matrix: row " + std::to_string(r + 1) + " column " + std::to_string(c + 1) +
                                 " is not finite");
            m(r, c) = v;
        }
    }
    return m;
}

inline std::string format_matrix(const Matrix<double>& m)
{
    std::string s = "{\"rows\":" + std::to_string(m.rows()) + ",\"cols\":" + std::to_string(m.cols()) + ",\"data\":[";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        s += r ? ",[" : "[";
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c)
                s += ',';
            s += format_real(m(r, c));
        }
        s += ']';
    }
    s += "]}";
    return s;
}

/// A matrix document is either one matrix object or a list of them (one per
/// sentence).
inline std::vector<Matrix<double>> parse_matrix_document(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("matrix: invalid JSON: ") + e.what());
    }
    std::vector<Matrix<double>> out;
    if (doc.is_array()) {
        for (std::size_t k = 0; k < doc.size(); ++k) {
            try {
                out.push_back(matrix_from_json(doc[k]));
            } catch (const ParseError& e) {
                throw ParseError("record " + std::to_string(k + 1) + ": " + e.what());
            }
        }
    } else {
        out.push_back(matrix_from_json(doc));
    }
    return out;
}

/// Inverse of parse_matrix_document. A single matrix is written as a bare
/// object, several as a list with one matrix per line.
inline std::string format_matrix_document(std::span<const Matrix<double>> matrices)
{
    if (matrices.size() == 1)
        return format_matrix(matrices.front()) + "\n";
    std::string s = "[\n";
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        s += format_matrix(matrices[k]);
        s += k + 1 < matrices.size() ? ",\n" : "\n";
    }
    s += "]\n";
    return s;
}

inline std::vector<Matrix<double>> read_matrix_file(const std::filesystem::path& file)
{
    return parse_matrix_document(read_text_file(file));
}

inline void write_matrix_file(const std::filesystem::path& file, std::span<const Matrix<double>> matrices)
{
    write_text_file(file, format_matrix_document(matrices));
}

// ---------------------------------------------------------------------------
// Reports

struct SentenceResult
{
    int id = 0;
    int source_len = 0;
    int target_len = 0;
    std::optional<MetricReport> metrics;
    std::optional<double> iou;
    std::optional<DualLossReport> loss;
};

struct CorpusReport
{
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<SentenceResult> sentences;
    std::size_t skipped = 0;
};

namespace detail
{
/// Running arithmetic mean of one report field.
struct Mean
{
    double sum = 0.0;
    std::size_t n = 0;

    void add(double v)
    {
        sum += v;
        ++n;
    }
};
} // namespace detail

/// JSON report with a fixed key order. Aggregates are plain means over the
/// sentences that carry each value; the aggregate block is omitted for an
/// empty corpus.
inline std::string write_report(const CorpusReport& report)
{
    using ojson = nlohmann::ordered_json;
    ojson doc = ojson::object();

    ojson meta = ojson::object();
    for (const auto& [k, v] : report.metadata)
        meta[k] = v;
    doc["metadata"] = meta;
    doc["count"] = report.sentences.size();
    doc["skipped"] = report.skipped;

    std::map<std::string, detail::Mean> means;
    const std::vector<std::string> order = {"al",  "ap",      "dal",     "a_suf",    "a_nec",
                                            "iou", "omega_f", "omega_b", "total_reg"};

    ojson sentences = ojson::array();
    for (const SentenceResult& s : report.sentences) {
        ojson rec = ojson::object();
        rec["id"] = s.id;
        rec["src_len"] = s.source_len;
        rec["tgt_len"] = s.target_len;
        auto put = [&](const std::string& key, double v) {
            rec[key] = v;
            means[key].add(v);
        };
        if (s.metrics) {
            put("al", s.metrics->al);
            put("ap", s.metrics->ap);
            put("dal", s.metrics->dal);
            if (s.metrics->a_suf)
                put("a_suf", *s.metrics->a_suf);
            if (s.metrics->a_nec)
                put("a_nec", *s.metrics->a_nec);
            if (s.metrics->a_suf || s.metrics->a_nec) {
                rec["aligned"] = s.metrics->aligned_count;
                rec["qualifying"] = s.metrics->qualifying_count;
            }
        }
        if (s.iou)
            put("iou", *s.iou);
        if (s.loss) {
            put("omega_f", s.loss->omega_f);
            put("omega_b", s.loss->omega_b);
            put("total_reg", s.loss->total_reg);
        }
        sentences.push_back(std::move(rec));
    }
    doc["sentences"] = std::move(sentences);

    if (!report.sentences.empty()) {
        ojson agg = ojson::object();
        for (const std::string& key : order) {
            const auto it = means.find(key);
            if (it != means.end() && it->second.n > 0)
                agg[key] = it->second.sum / static_cast<double>(it->second.n);
        }
        doc["aggregate"] = std::move(agg);
    }
    return doc.dump(2) + "\n";
}

/// Flattens a report into tab-separated columns for plotting: one row per
/// sentence, then a "mean" row. Missing values are written as NA.
inline std::string report_to_table(std::string_view report_json)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(report_json);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("sentences") || !doc["sentences"].is_array())
        throw ParseError("report: missing \"sentences\" list");

    const std::vector<std::string> columns = {"al",  "ap",      "dal",     "a_suf",    "a_nec",
                                              "iou", "omega_f", "omega_b", "total_reg"};
    auto cell = [](const nlohmann::json& obj, const std::string& key) {
        return obj.contains(key) && obj[key].is_number() ? format_real(obj[key].get<double>()) : std::string("NA");
    };

    std::string out = "id\tsrc_len\ttgt_len";
    for (const auto& c : columns)
        out += "\t" + c;
    out += '\n';
    for (const auto& s : doc["sentences"]) {
        out += cell(s, "id") + "\t" + cell(s, "src_len") + "\t" + cell(s, "tgt_len");
        for (const auto& c : columns)
            out += "\t" + cell(s, c);
        out += '\n';
    }
    if (doc.contains("aggregate")) {
        out += "mean\tNA\tNA";
        for (const auto& c : columns)
            out += "\t" + cell(doc["aggregate"], c);
        out += '\n';
    }
    return out;
}

} // namespace dualpath

#endif // DUALPATH_IO_HPP
