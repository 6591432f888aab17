#ifndef DUALPATH_TOOLS_CLI_APP_HPP
#define DUALPATH_TOOLS_CLI_APP_HPP

#include <algorithm>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <dualpath/dualpath.hpp>

namespace dualpath::cli
{

enum ExitCode : int { ok = 0, input_error = 1, consistency_error = 2 };

struct Streams
{
    std::ostream& out;
    std::ostream& err;
};

inline void emit(const std::string& output, std::string_view text, Streams io)
{
    if (output.empty() || output == "-")
        io.out << text;
    else
        write_text_file(output, text);
}

/// Per-sentence AL/AP/DAL plus alignment metrics when alignments are given.
/// Dimensions come from the corpus when present, otherwise from the paths.
inline CorpusReport evaluate_corpus(const std::vector<GSequence>& paths, std::vector<SentencePairRecord>* corpus,
                                    const std::optional<std::string>& alignment_text, int base)
{
    CorpusReport report;
    if (corpus) {
        if (corpus->size() != paths.size())
            throw DimensionError(std::to_string(paths.size()) + " paths for " + std::to_string(corpus->size()) +
                                 " corpus records");
        for (std::size_t n = 0; n < paths.size(); ++n) {
            const auto& rec = (*corpus)[n];
            if (paths[n].target_len() != rec.target_len() || paths[n].source_len() != rec.source_len())
                throw DimensionError("record " + std::to_string(rec.id) + ": path is " +
                                     std::to_string(paths[n].target_len()) + "x" +
                                     std::to_string(paths[n].source_len()) + " but sentence pair is " +
                                     std::to_string(rec.target_len()) + "x" + std::to_string(rec.source_len()));
        }
        if (alignment_text)
            attach_alignments(*corpus, *alignment_text, base);
    }

    std::vector<std::string_view> alignment_lines;
    if (alignment_text && !corpus) {
        alignment_lines = split_lines(*alignment_text);
        if (alignment_lines.size() != paths.size())
            throw DimensionError(std::to_string(alignment_lines.size()) + " alignment lines for " +
                                 std::to_string(paths.size()) + " paths");
    }

    for (std::size_t n = 0; n < paths.size(); ++n) {
        const GSequence& g = paths[n];
        SentenceResult s;
        s.id = corpus ? (*corpus)[n].id : static_cast<int>(n + 1);
        s.source_len = g.source_len();
        s.target_len = g.target_len();

        std::optional<OraclePositions> oracle;
        if (corpus && (*corpus)[n].alignment) {
            oracle = (*corpus)[n].alignment->oracle_positions();
        } else if (!alignment_lines.empty()) {
            try {
                oracle = parse_pharaoh(alignment_lines[n], g.target_len(), g.source_len(), base).oracle_positions();
            } catch (const ParseError& e) {
                throw ParseError(std::string(e.what()) + " (record " + std::to_string(s.id) + ")", n + 1);
            } catch (const DimensionError& e) {
                throw DimensionError("record " + std::to_string(s.id) + ": " + e.what());
            }
        }
        s.metrics = evaluate_path(g, oracle ? &*oracle : nullptr);
        report.sentences.push_back(std::move(s));
    }
    return report;
}

namespace detail
{

enum class InputKind { matrix, path };

inline InputKind sniff_input(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return InputKind::path;
    if (text[first] == '[')
        return InputKind::matrix;
    if (text[first] != '{')
        return InputKind::path;
    const auto lines = split_lines(std::string_view(text).substr(first));
    try {
        const auto doc = nlohmann::json::parse(lines.front());
        return doc.is_object() && doc.contains("g") ? InputKind::path : InputKind::matrix;
    } catch (const nlohmann::json::exception&) {
        // a pretty-printed matrix does not fit on one line
        return InputKind::matrix;
    }
}

struct TransposeOptions
{
    std::string input;
    std::string output;
    std::string gamma;
    std::string format = "auto";
    bool strict = false;
};

inline int cmd_transpose(const TransposeOptions& opt, Streams io)
{
    const std::string text = read_text_file(opt.input);
    InputKind kind = opt.format == "matrix" ? InputKind::matrix
                     : opt.format == "path" ? InputKind::path
                                            : sniff_input(text);

    PathFile backward;
    std::vector<Matrix<double>> gammas;
    if (kind == InputKind::matrix) {
        backward.format = PathFormat::json;
        const auto matrices = parse_matrix_document(text);
        for (std::size_t k = 0; k < matrices.size(); ++k) {
            const std::string record = "record " + std::to_string(k + 1);
            std::optional<WritingProbabilityMatrix> alpha;
            try {
                alpha.emplace(matrices[k]);
            } catch (const InvalidInput& e) {
                throw InvalidInput(record + ": " + e.what());
            }
            TransposeResult r = [&] {
                try {
                    return transpose_path(*alpha, opt.strict ? Monotonicity::strict : Monotonicity::repair);
                } catch (const ConsistencyError& e) {
                    throw ConsistencyError(record + ": " + e.what());
                }
            }();
            if (r.monotonized)
                io.err << "warning: " << record << ": row argmax was not monotone; repaired by running maximum\n";
            gammas.push_back(r.gamma.dense());
            backward.paths.push_back(std::move(r.g_back));
        }
    } else {
        const PathFile forward = parse_path_file(text);
        backward.format = forward.format;
        for (const GSequence& g : forward.paths) {
            TransposeResult r = transpose_path(g);
            if (!g.complete())
                io.err << "warning: path ends before reading all " << g.source_len()
                       << " source tokens; trailing tokens join the last segment\n";
            gammas.push_back(r.gamma.dense());
            backward.paths.push_back(std::move(r.g_back));
        }
    }

    if (!opt.gamma.empty())
        write_text_file(opt.gamma, format_matrix_document(gammas));
    emit(opt.output, format_path_file(backward), io);
    return ok;
}

struct MetricsOptions
{
    std::string input;
    std::string alignments;
    std::string corpus;
    std::string output;
    int base = 0;
};

inline int cmd_metrics(const MetricsOptions& opt, Streams io)
{
    const PathFile paths = read_path_file(opt.input);
    std::optional<std::vector<SentencePairRecord>> corpus;
    if (!opt.corpus.empty())
        corpus = read_corpus_file(opt.corpus);
    std::optional<std::string> alignments;
    if (!opt.alignments.empty())
        alignments = read_text_file(opt.alignments);

    CorpusReport report = evaluate_corpus(paths.paths, corpus ? &*corpus : nullptr, alignments, opt.base);
    report.metadata = {{"command", "metrics"}};
    emit(opt.output, write_report(report), io);
    return ok;
}

struct CompareOptions
{
    std::vector<std::string> inputs;
    std::vector<std::string> matrices;
    std::string output;
    double lambda_dual = default_lambda_dual;
    bool strict = false;
};

inline int cmd_compare(const CompareOptions& opt, Streams io)
{
    const PathFile forward = read_path_file(opt.inputs.at(0));
    const PathFile backward = read_path_file(opt.inputs.at(1));
    if (forward.paths.size() != backward.paths.size())
        throw DimensionError(std::to_string(forward.paths.size()) + " forward paths but " +
                             std::to_string(backward.paths.size()) + " backward paths");

    std::vector<Matrix<double>> alpha_f;
    std::vector<Matrix<double>> alpha_b;
    if (!opt.matrices.empty()) {
        alpha_f = read_matrix_file(opt.matrices.at(0));
        alpha_b = read_matrix_file(opt.matrices.at(1));
        if (alpha_f.size() != forward.paths.size() || alpha_b.size() != forward.paths.size())
            throw DimensionError("matrix documents hold " + std::to_string(alpha_f.size()) + " and " +
                                 std::to_string(alpha_b.size()) + " matrices for " +
                                 std::to_string(forward.paths.size()) + " path records");
    }

    CorpusReport report;
    report.metadata = {{"command", "compare"}};
    if (!alpha_f.empty())
        report.metadata.emplace_back("lambda_dual", format_real(opt.lambda_dual));

    for (std::size_t n = 0; n < forward.paths.size(); ++n) {
        const int id = static_cast<int>(n + 1);
        const GSequence& gf = forward.paths[n];
        const GSequence& gb = backward.paths[n];
        SentenceResult s;
        s.id = id;
        s.source_len = gf.source_len();
        s.target_len = gf.target_len();
        try {
            s.iou = iou_duality(gf, gb);
            if (!alpha_f.empty()) {
                const WritingProbabilityMatrix af(alpha_f[n]);
                const WritingProbabilityMatrix ab(alpha_b[n]);
                if (af.target_len() != gf.target_len() || af.source_len() != gf.source_len())
                    throw DimensionError("forward matrix shape does not match the forward path");
                s.loss = dual_regularizer(af, ab, opt.lambda_dual,
                                          opt.strict ? Monotonicity::strict : Monotonicity::repair);
                if (s.loss->monotonized_f || s.loss->monotonized_b)
                    io.err << "warning: record " << id << ": row argmax was not monotone; repaired by running maximum\n";
            }
        } catch (const ConsistencyError& e) {
            io.err << "warning: record " << id << " skipped: " << e.what() << "\n";
            ++report.skipped;
            continue;
        } catch (const InvalidInput& e) {
            throw InvalidInput("record " + std::to_string(id) + ": " + e.what());
        }
        report.sentences.push_back(std::move(s));
    }
    emit(opt.output, write_report(report), io);
    return ok;
}

struct SimulateOptions
{
    std::string policy = "wait_k";
    int k = 3;
    std::string corpus;
    std::string alignments;
    std::string input;
    std::string paths_output;
    std::string path_format = "actions";
    std::string output;
    int base = 0;
};

inline int cmd_simulate(const SimulateOptions& opt, Streams io)
{
    const PolicySpec spec{parse_policy_kind(opt.policy), opt.k};
    spec.validate();

    std::optional<std::vector<SentencePairRecord>> corpus;
    if (!opt.corpus.empty())
        corpus = read_corpus_file(opt.corpus);
    std::optional<std::string> alignments;
    if (!opt.alignments.empty())
        alignments = read_text_file(opt.alignments);

    PathFile generated;
    generated.format = opt.path_format == "json" ? PathFormat::json : PathFormat::actions;
    switch (spec.kind) {
    case PolicyKind::wait_k:
        if (!corpus)
            throw InvalidInput("simulate: the wait_k policy needs --corpus");
        for (const auto& rec : *corpus)
            generated.paths.push_back(wait_k_path(spec.k, rec.target_len(), rec.source_len()));
        break;
    case PolicyKind::oracle_alignment:
        if (!corpus || !alignments)
            throw InvalidInput("simulate: the oracle_alignment policy needs --corpus and --alignments");
        attach_alignments(*corpus, *alignments, opt.base);
        for (const auto& rec : *corpus)
            generated.paths.push_back(oracle_path_from_alignment(rec.alignment->oracle_positions()));
        break;
    case PolicyKind::replay:
        if (opt.input.empty())
            throw InvalidInput("simulate: the replay policy needs --input");
        generated = read_path_file(opt.input);
        break;
    }

    CorpusReport report = evaluate_corpus(generated.paths, corpus ? &*corpus : nullptr, alignments, opt.base);
    report.metadata = {{"command", "simulate"}, {"policy", std::string(to_string(spec.kind))}};
    if (spec.kind == PolicyKind::wait_k)
        report.metadata.emplace_back("k", std::to_string(spec.k));

    if (!opt.paths_output.empty())
        write_path_file(opt.paths_output, generated);
    emit(opt.output, write_report(report), io);
    return ok;
}

struct ReportOptions
{
    std::string input;
    std::string output;
};

inline int cmd_report(const ReportOptions& opt, Streams io)
{
    emit(opt.output, report_to_table(read_text_file(opt.input)), io);
    return ok;
}

} // namespace detail

/// Runs the command line. `args` excludes the program name.
inline int run(std::vector<std::string> args, Streams io)
{
    CLI::App app{"Read/write path analysis for simultaneous translation", "dualpath"};
    app.require_subcommand(1);

    detail::TransposeOptions topt;
    auto* transpose = app.add_subcommand("transpose", "Transpose alpha matrices or paths into the reverse direction");
    transpose->add_option("--input", topt.input, "alpha matrix document or path file")->required()->check(CLI::ExistingFile);
    transpose->add_option("--output", topt.output, "backward path file (default: stdout)");
    transpose->add_option("--gamma", topt.gamma, "write the transposed gamma matrices here");
    transpose->add_option("--format", topt.format, "input kind")->check(CLI::IsMember({"auto", "matrix", "path"}));
    transpose->add_flag("--strict-monotonic", topt.strict, "reject non-monotone argmax instead of repairing it");

    detail::MetricsOptions mopt;
    auto* metrics = app.add_subcommand("metrics", "Latency and alignment metrics for a path file");
    metrics->add_option("--input", mopt.input, "path file")->required()->check(CLI::ExistingFile);
    metrics->add_option("--alignments", mopt.alignments, "Pharaoh alignments, one line per path")->check(CLI::ExistingFile);
    metrics->add_option("--corpus", mopt.corpus, "tab-separated corpus")->check(CLI::ExistingFile);
    metrics->add_option("--output", mopt.output, "report file (default: stdout)");
    metrics->add_option("--base", mopt.base, "alignment index base")->check(CLI::IsMember({0, 1}));

    detail::CompareOptions copt;
    auto* compare = app.add_subcommand("compare", "Duality (IoU, omega) between forward and backward paths");
    compare->add_option("--input", copt.inputs, "forward path file, then backward path file")
        ->required()
        ->expected(2)
        ->check(CLI::ExistingFile);
    compare->add_option("--matrices", copt.matrices, "forward and backward alpha documents")
        ->expected(2)
        ->check(CLI::ExistingFile);
    compare->add_option("--lambda-dual", copt.lambda_dual, "regularizer weight")->check(CLI::NonNegativeNumber);
    compare->add_option("--output", copt.output, "report file (default: stdout)");
    compare->add_flag("--strict-monotonic", copt.strict, "skip records whose argmax is not monotone");

    detail::SimulateOptions sopt;
    auto* simulate = app.add_subcommand("simulate", "Generate paths with a fixed policy and score them");
    simulate->add_option("--policy", sopt.policy, "wait_k, oracle_alignment or replay");
    simulate->add_option("--k", sopt.k, "lag for wait_k");
    simulate->add_option("--corpus", sopt.corpus, "tab-separated corpus")->check(CLI::ExistingFile);
    simulate->add_option("--alignments", sopt.alignments, "Pharaoh alignments")->check(CLI::ExistingFile);
    simulate->add_option("--input", sopt.input, "path file to replay")->check(CLI::ExistingFile);
    simulate->add_option("--paths", sopt.paths_output, "write generated paths here");
    simulate->add_option("--path-format", sopt.path_format, "generated path format")
        ->check(CLI::IsMember({"actions", "json"}));
    simulate->add_option("--output", sopt.output, "report file (default: stdout)");
    simulate->add_option("--base", sopt.base, "alignment index base")->check(CLI::IsMember({0, 1}));

    detail::ReportOptions ropt;
    auto* report = app.add_subcommand("report", "Flatten a JSON report into a tab-separated table");
    report->add_option("--input", ropt.input, "report produced by metrics, compare or simulate")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--output", ropt.output, "table file (default: stdout)");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        app.exit(e, io.out, io.err);
        return e.get_exit_code() == 0 ? ok : input_error;
    }

    try {
        if (*transpose)
            return detail::cmd_transpose(topt, io);
        if (*metrics)
            return detail::cmd_metrics(mopt, io);
        if (*compare)
            return detail::cmd_compare(copt, io);
        if (*simulate)
            return detail::cmd_simulate(sopt, io);
        if (*report)
            return detail::cmd_report(ropt, io);
    } catch (const ConsistencyError& e) {
        io.err << "error: " << e.what() << "\n";
        return consistency_error;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << "\n";
        return input_error;
    }
    return input_error;
}

} // namespace dualpath::cli

#endif // DUALPATH_TOOLS_CLI_APP_HPP
