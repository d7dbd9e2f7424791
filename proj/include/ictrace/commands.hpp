#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ictrace/config.hpp"
#include "ictrace/io.hpp"
#include "ictrace/pipeline.hpp"
#include "ictrace/svg.hpp"

namespace ictrace {

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline std::string require_out_dir(const Config& cfg) {
    const std::string out = cfg.get_string("out");
    if (out.empty()) throw ArgumentError("missing required option: out");
    std::filesystem::create_directories(out);
    return out;
}

/// `seeds = [0, 1, 2]` lists master seeds; a single integer N is shorthand
/// for 0 .. N-1.
inline std::vector<std::uint64_t> resolve_seeds(const Config& cfg, int fallback_count) {
    std::vector<long> raw = cfg.get_long_list("seeds");
    std::vector<std::uint64_t> seeds;
    if (raw.empty()) {
        for (int i = 0; i < fallback_count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    } else if (raw.size() == 1 && !cfg.get_string("seeds").starts_with("[")) {
        if (raw[0] < 1) throw ArgumentError("seeds: count must be >= 1");
        for (long i = 0; i < raw[0]; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    } else {
        for (long s : raw) seeds.push_back(static_cast<std::uint64_t>(s));
    }
    if (seeds.empty()) throw ArgumentError("seeds: list must be nonempty");
    return seeds;
}

inline Graph graph_from_config(const Config& cfg) {
    const std::string path = cfg.get_string("graph");
    if (!path.empty()) return decode_graph(read_text(path));
    const std::string topology = cfg.get_string("topology");
    if (topology.empty())
        throw ArgumentError("need either graph = <path> or topology = ring|grid|hex");
    if (topology == "ring") return build_ring(static_cast<int>(cfg.get_long("n", 0)));
    if (topology == "grid" || topology == "square_grid")
        return build_square_grid(static_cast<int>(cfg.get_long("m", 0)));
    if (topology == "hex")
        return build_hex(static_cast<int>(cfg.get_long("rows", 0)),
                         static_cast<int>(cfg.get_long("cols", 0)));
    throw ArgumentError("unknown topology: " + topology);
}

inline DgpKind kind_from_config(const Config& cfg, const Graph& g) {
    const std::string kind = cfg.get_string("kind");
    if (!kind.empty()) return dgp_kind_from_name(kind);
    return g.topology == Topology::ring ? DgpKind::pairs : DgpKind::walk;
}

inline std::string context_file_name(std::uint64_t seed) {
    return "contexts_seed" + std::to_string(seed) + ".jsonl";
}

inline std::string length_tag(long l) { return "l" + std::to_string(l); }

inline std::string seed_cell(std::uint64_t seed) { return std::to_string(seed); }

}  // namespace detail

// ---------------------------------------------------------------------------
// gen: graph + vocabulary + one context file per master seed
// ---------------------------------------------------------------------------

inline std::vector<std::string> cmd_gen(const Config& cfg) {
    const std::string out = detail::require_out_dir(cfg);
    const Graph g = detail::graph_from_config(cfg);
    const DgpKind kind = detail::kind_from_config(cfg, g);
    const long length = cfg.get_long("length", 0);
    if (length < 1) throw ArgumentError("gen: need length >= 1");
    const auto seeds = detail::resolve_seeds(cfg, 1);

    std::vector<std::string> pool = default_label_pool();
    const std::string pool_path = cfg.get_string("label_pool");
    if (!pool_path.empty()) {
        pool.clear();
        std::istringstream in(read_text(pool_path));
        std::string word;
        while (std::getline(in, word))
            if (!word.empty()) pool.push_back(word);
    } else if (static_cast<int>(pool.size()) < g.n) {
        // synthesize a big-enough pool for large graphs
        pool.clear();
        for (int i = 0; i < g.n; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "node%04d", i);
            pool.push_back(buf);
        }
    }
    const Vocabulary vocab =
        assign_labels(g, pool, static_cast<std::uint64_t>(cfg.get_long("label_seed", 0)));

    std::vector<std::string> files;
    write_text(detail::join_path(out, "graph.json"), encode_graph(g) + "\n");
    files.push_back("graph.json");
    {
        nlohmann::json j;
        j["labels"] = vocab.labels;
        write_text(detail::join_path(out, "vocab.json"), j.dump() + "\n");
        files.push_back("vocab.json");
    }
    for (std::uint64_t seed : seeds) {
        const PromptBatch batch = make_batch(g, length, kind, seed);
        const std::string name = detail::context_file_name(seed);
        write_contexts(batch, detail::join_path(out, name), &vocab);
        files.push_back(name);
    }
    write_text(detail::join_path(out, "config.resolved.toml"), cfg.snapshot());
    files.push_back("config.resolved.toml");
    write_manifest(out, files);
    return files;
}

// ---------------------------------------------------------------------------
// analyze: curves, PCA scores, cosines from replayed contexts or a dump
// ---------------------------------------------------------------------------

namespace detail {

inline void write_pca_csv(const std::string& path, const Matrix& scores,
                          const std::vector<int>& rows, const Vocabulary* vocab) {
    std::string header = "node_index,label";
    const std::vector<std::string> axis = {"x", "y", "z"};
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
        header += ",";
        header += c < 3 ? axis[static_cast<std::size_t>(c)] : "c" + std::to_string(c + 1);
    }
    CsvWriter csv(header);
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const int node = rows.empty() ? static_cast<int>(i) : rows[static_cast<std::size_t>(i)];
        std::vector<std::string> cells = {
            std::to_string(node),
            vocab ? vocab->labels.at(static_cast<std::size_t>(node)) : ""};
        for (Eigen::Index c = 0; c < scores.cols(); ++c) cells.push_back(format_double(scores(i, c)));
        csv.add_row(cells);
    }
    csv.save(path);
}

inline void write_scatter_svg(const std::string& path, const Graph& g, const Matrix& coords,
                              const std::vector<int>& rows, const Vocabulary* vocab,
                              const std::string& title) {
    SvgPlot plot(480, 420, title);
    std::vector<int> to_row(static_cast<std::size_t>(g.n), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) to_row[static_cast<std::size_t>(rows[i])] = static_cast<int>(i);
    std::vector<std::array<double, 4>> segments;
    for (auto [u, v] : g.edges) {
        const int ru = rows.empty() ? u : to_row[static_cast<std::size_t>(u)];
        const int rv = rows.empty() ? v : to_row[static_cast<std::size_t>(v)];
        if (ru < 0 || rv < 0) continue;
        segments.push_back({coords(ru, 0), coords(ru, 1), coords(rv, 0), coords(rv, 1)});
    }
    plot.add_segments(std::move(segments), "#999");
    std::vector<std::pair<double, double>> pts;
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        pts.emplace_back(coords(i, 0), coords(i, 1));
        const int node = rows.empty() ? static_cast<int>(i) : rows[static_cast<std::size_t>(i)];
        labels.push_back(vocab ? vocab->labels.at(static_cast<std::size_t>(node))
                               : std::to_string(node));
    }
    plot.add_points(std::move(pts), "#1f77b4", std::move(labels));
    write_text(path, plot.str());
}

inline std::optional<Vocabulary> try_read_vocab(const std::string& path) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        const nlohmann::json j = nlohmann::json::parse(read_text(path));
        Vocabulary vocab;
        vocab.labels = j.at("labels").get<std::vector<std::string>>();
        return vocab;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("vocab json: ") + e.what());
    }
}

}  // namespace detail

inline std::vector<std::string> cmd_analyze(const Config& cfg) {
    const std::string out = detail::require_out_dir(cfg);
    const std::string in_dir = cfg.get_string("in");
    if (in_dir.empty() && cfg.get_string("graph").empty())
        throw ArgumentError("analyze: need in = <gen output dir> or graph = <path>");

    Config graph_cfg = cfg;
    if (cfg.get_string("graph").empty())
        graph_cfg.set("graph", detail::join_path(in_dir, "graph.json"));
    const Graph g = detail::graph_from_config(graph_cfg);
    std::optional<Vocabulary> vocab;
    if (!in_dir.empty()) vocab = detail::try_read_vocab(detail::join_path(in_dir, "vocab.json"));
    const Vocabulary* vocab_ptr = vocab ? &*vocab : nullptr;

    const std::string source = cfg.get_string("source", "oracle");
    std::vector<long> lengths = cfg.get_long_list("lengths");
    const int window = static_cast<int>(cfg.get_long("window", 200));
    const int layer = static_cast<int>(cfg.get_long("layer", 0));
    const int jobs = static_cast<int>(cfg.get_long("jobs", 1));
    std::set<int> pc_dims;
    for (long d : cfg.get_long_list("pc_dims")) pc_dims.insert(static_cast<int>(d));

    std::vector<std::string> files;
    CsvWriter energy_csv("metric,context_length,value,seed");
    CsvWriter accuracy_csv("metric,context_length,value,seed");
    CsvWriter cosine_csv("context_length,cos_pc1_z2,cos_pc2_z3,seed");
    CsvWriter subspace_csv("metric,context_length,value,seed");
    bool have_accuracy = false;

    if (source == "oracle") {
        if (in_dir.empty()) throw ArgumentError("analyze: oracle source needs in = <dir>");
        std::vector<std::uint64_t> seeds;
        if (cfg.has("seeds")) {
            seeds = detail::resolve_seeds(cfg, 1);
        } else {
            for (const auto& entry : std::filesystem::directory_iterator(in_dir)) {
                const std::string name = entry.path().filename().string();
                if (name.starts_with("contexts_seed") && name.ends_with(".jsonl"))
                    seeds.push_back(std::stoull(name.substr(13, name.size() - 13 - 6)));
            }
            std::sort(seeds.begin(), seeds.end());
            if (seeds.empty()) throw FormatError("analyze: no contexts_seed*.jsonl in " + in_dir);
        }

        std::vector<PromptBatch> batches;
        long max_len = 0;
        for (std::uint64_t seed : seeds) {
            const auto decoded =
                read_contexts(detail::join_path(in_dir, detail::context_file_name(seed)));
            PromptBatch batch;
            for (const auto& d : decoded) {
                if (!d.sequence.tokens.empty())
                    max_len = std::max<long>(max_len, static_cast<long>(d.sequence.tokens.size()));
                batch.sequences.push_back(d.sequence);
            }
            if (static_cast<int>(batch.sequences.size()) != g.n)
                throw FormatError("analyze: batch for seed " + std::to_string(seed) + " has " +
                                  std::to_string(batch.sequences.size()) + " sequences, graph has " +
                                  std::to_string(g.n) + " nodes");
            batches.push_back(std::move(batch));
        }
        if (lengths.empty()) lengths = log_spaced_lengths(std::min<long>(10, max_len), max_len, 8);
        for (long l : lengths)
            if (l > max_len)
                throw ArgumentError("analyze: length " + std::to_string(l) +
                                    " exceeds stored context length " + std::to_string(max_len));

        OracleCurveOptions opts;
        opts.lengths = lengths;
        opts.embed_dim = static_cast<int>(cfg.get_long("embed_dim", 3));
        opts.noise = cfg.get_double("noise", 0.05);
        opts.pca_components = 3;
        opts.jobs = jobs;
        const OracleRunResult run = run_oracle_curves(g, batches, seeds, opts);

        for (const auto& sc : run.per_seed) {
            for (std::size_t li = 0; li < lengths.size(); ++li) {
                const std::string l = std::to_string(lengths[li]);
                const std::string seed = detail::seed_cell(sc.seed);
                energy_csv.add_row({"energy_ordered", l, format_double(sc.energy_ordered[li]), seed});
                energy_csv.add_row(
                    {"energy_quadratic", l, format_double(sc.energy_quadratic[li]), seed});
                energy_csv.add_row(
                    {"energy_standardized", l, format_double(sc.energy_standardized[li]), seed});
                accuracy_csv.add_row({"accuracy", l, format_double(sc.accuracy[li]), seed});
                cosine_csv.add_row({l, format_double(sc.cosines[li].first),
                                    format_double(sc.cosines[li].second), seed});
            }
        }
        for (std::size_t li = 0; li < lengths.size(); ++li) {
            const std::string l = std::to_string(lengths[li]);
            energy_csv.add_row({"energy_standardized", l,
                                format_double(run.median_energy_standardized.points[li].y),
                                "median"});
            accuracy_csv.add_row(
                {"accuracy", l, format_double(run.median_accuracy.points[li].y), "median"});
        }
        have_accuracy = true;

        // memorization baselines for the same grid
        for (std::size_t li = 0; li < lengths.size(); ++li) {
            const std::string l = std::to_string(lengths[li]);
            accuracy_csv.add_row(
                {"memorization_seen1", l, format_double(p_seen1(g.n, lengths[li])), "analytic"});
            accuracy_csv.add_row(
                {"memorization_seen2", l, format_double(p_seen2(g.n, lengths[li])), "analytic"});
        }

        // per-length PCA scores + panels from the first batch
        for (std::size_t li = 0; li < lengths.size(); ++li) {
            const Matrix& scores = run.pca_scores_first_seed[li];
            const std::string csv_name = "pca_scores_" + detail::length_tag(lengths[li]) + ".csv";
            detail::write_pca_csv(detail::join_path(out, csv_name), scores, {}, vocab_ptr);
            files.push_back(csv_name);
            const std::string svg_name = "pca_" + detail::length_tag(lengths[li]) + ".svg";
            detail::write_scatter_svg(detail::join_path(out, svg_name), g, scores.leftCols(2), {},
                                      vocab_ptr, "pca scores, context length " +
                                                     std::to_string(lengths[li]));
            files.push_back(svg_name);
        }

        if (!pc_dims.empty()) {
            // replay once more per seed to report per-subspace energies
            for (std::size_t bi = 0; bi < batches.size(); ++bi) {
                OracleState pooled = make_oracle(g.n, opts.embed_dim, opts.noise, seeds[bi]);
                long done = 0;
                for (long l : lengths) {
                    for (const auto& seq : batches[bi].sequences)
                        detail::observe_range(pooled, seq, done, l);
                    done = l;
                    const ReprTable table = oracle_reprs(pooled, g.n);
                    const EnergyValue e = energy_on_components(g, table, pc_dims);
                    std::string dims_name = "energy_pc";
                    for (int d : pc_dims) dims_name += "_" + std::to_string(d);
                    subspace_csv.add_row({dims_name, std::to_string(l), format_double(e.value),
                                          detail::seed_cell(seeds[bi])});
                }
            }
        }

        {
            SvgPlot plot(520, 380, "accuracy and standardized energy vs context length");
            plot.set_log_axes(true, true);
            std::vector<std::pair<double, double>> acc, en;
            for (const auto& p : run.median_accuracy.points)
                acc.emplace_back(static_cast<double>(p.x), std::max(p.y, 1e-6));
            for (const auto& p : run.median_energy_standardized.points)
                en.emplace_back(static_cast<double>(p.x), std::max(p.y, 1e-6));
            plot.add_line(std::move(acc), "#1f77b4", "accuracy (median)");
            plot.add_line(std::move(en), "#d62728", "standardized energy (median)");
            write_text(detail::join_path(out, "curves.svg"), plot.str());
            files.push_back("curves.svg");
        }
    } else if (source == "dump") {
        const std::string dump_path = cfg.get_string("dump");
        if (dump_path.empty()) throw ArgumentError("analyze: dump source needs dump = <path>");
        const ActivationDump dump = ingest_dump(dump_path);
        if (dump.max_token_id() + 1 > g.n)
            throw FormatError("analyze: dump token ids imply at least " +
                              std::to_string(dump.max_token_id() + 1) + " nodes, graph has " +
                              std::to_string(g.n));
        if (lengths.empty()) {
            long max_pos = 0;
            for (const auto& r : dump.records)
                max_pos = std::max<long>(max_pos, static_cast<long>(r.position) + 1);
            lengths = log_spaced_lengths(std::min<long>(10, max_pos), max_pos, 8);
        }
        for (long l : lengths) {
            const ReprTable table = mean_token_reprs(dump, layer, l, window, g.n);
            const std::string lcell = std::to_string(l);
            energy_csv.add_row({"energy_ordered", lcell,
                                format_double(dirichlet_energy(g, table,
                                                               EnergyConvention::ordered_pair_sum)
                                                  .value),
                                "dump"});
            energy_csv.add_row(
                {"energy_quadratic", lcell,
                 format_double(dirichlet_energy(g, table, EnergyConvention::laplacian_quadratic)
                                   .value),
                 "dump"});
            energy_csv.add_row({"energy_standardized", lcell,
                                format_double(standardized_energy(g, table).value), "dump"});
            auto [sub, rows] = valid_submatrix(table);
            if (std::min<Eigen::Index>(sub.rows() - 1, sub.cols()) >= 2) {
                const auto cosines = cosine_to_spectral(table, g);
                cosine_csv.add_row(
                    {lcell, format_double(cosines.first), format_double(cosines.second), "dump"});
                const int k = static_cast<int>(
                    std::min<Eigen::Index>(3, std::min<Eigen::Index>(sub.rows() - 1, sub.cols())));
                const PcaResult p = pca(sub, k);
                const std::string csv_name = "pca_scores_" + detail::length_tag(l) + ".csv";
                detail::write_pca_csv(detail::join_path(out, csv_name), p.scores, rows, vocab_ptr);
                files.push_back(csv_name);
                const std::string svg_name = "pca_" + detail::length_tag(l) + ".svg";
                detail::write_scatter_svg(detail::join_path(out, svg_name), g, p.scores.leftCols(2),
                                          rows, vocab_ptr,
                                          "pca scores, context length " + std::to_string(l));
                files.push_back(svg_name);
            }
            if (!pc_dims.empty()) {
                const EnergyValue e = energy_on_components(g, table, pc_dims);
                std::string dims_name = "energy_pc";
                for (int d : pc_dims) dims_name += "_" + std::to_string(d);
                subspace_csv.add_row({dims_name, lcell, format_double(e.value), "dump"});
            }
        }
    } else {
        throw ArgumentError("analyze: source must be oracle or dump");
    }

    const std::string predictions_path = cfg.get_string("predictions");
    if (!predictions_path.empty()) {
        const auto records = read_predictions(predictions_path);
        std::map<long, std::pair<double, long>> by_step;
        for (const auto& rec : records) {
            if (static_cast<int>(rec.dist.probs.size()) != g.n)
                throw FormatError("predictions: distribution size " +
                                  std::to_string(rec.dist.probs.size()) + " does not match n = " +
                                  std::to_string(g.n));
            auto& [sum, count] = by_step[rec.step];
            sum += rule_following_accuracy(g, rec.current, rec.dist);
            ++count;
        }
        for (const auto& [step, agg] : by_step)
            accuracy_csv.add_row({"accuracy", std::to_string(step),
                                  format_double(agg.first / static_cast<double>(agg.second)),
                                  "ingested"});
        have_accuracy = true;
    }

    energy_csv.save(detail::join_path(out, "energy_curves.csv"));
    files.push_back("energy_curves.csv");
    if (have_accuracy) {
        accuracy_csv.save(detail::join_path(out, "accuracy_curve.csv"));
        files.push_back("accuracy_curve.csv");
    }
    cosine_csv.save(detail::join_path(out, "cosine_to_spectral.csv"));
    files.push_back("cosine_to_spectral.csv");
    if (!pc_dims.empty()) {
        subspace_csv.save(detail::join_path(out, "subspace_energy.csv"));
        files.push_back("subspace_energy.csv");
    }
    write_text(detail::join_path(out, "config.resolved.toml"), cfg.snapshot());
    files.push_back("config.resolved.toml");
    write_manifest(out, files);
    return files;
}

// ---------------------------------------------------------------------------
// spectral: embedding coordinates and optional PCA export
// ---------------------------------------------------------------------------

inline std::vector<std::string> cmd_spectral(const Config& cfg) {
    const std::string out = detail::require_out_dir(cfg);
    const Graph g = detail::graph_from_config(cfg);
    std::optional<Vocabulary> vocab;
    const std::string vocab_path = cfg.get_string("vocab");
    if (!vocab_path.empty()) vocab = detail::try_read_vocab(vocab_path);
    const Vocabulary* vocab_ptr = vocab ? &*vocab : nullptr;

    std::vector<std::string> files;
    const Embedding emb = spectral_embedding(g);
    detail::write_pca_csv(detail::join_path(out, "embedding.csv"), emb.coords, {}, vocab_ptr);
    files.push_back("embedding.csv");

    {
        const SpectralBasis basis = energy_minimizers(g, std::min(g.n, 10));
        CsvWriter csv("k,eigenvalue");
        for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i)
            csv.add_row({std::to_string(i + 1), format_double(basis.eigenvalues(i))});
        csv.save(detail::join_path(out, "eigenvalues.csv"));
        files.push_back("eigenvalues.csv");
    }

    if (cfg.get_long("svg", 1) != 0) {
        detail::write_scatter_svg(detail::join_path(out, "embedding.svg"), g, emb.coords, {},
                                  vocab_ptr,
                                  emb.degenerate ? "spectral embedding (degenerate: disconnected)"
                                                 : "spectral embedding");
        files.push_back("embedding.svg");
    }

    const std::string dump_path = cfg.get_string("dump");
    if (!dump_path.empty()) {
        const ActivationDump dump = ingest_dump(dump_path);
        const int layer = static_cast<int>(cfg.get_long("layer", 0));
        const int window = static_cast<int>(cfg.get_long("window", 200));
        long position = cfg.get_long("length", 0);
        if (position <= 0) {
            for (const auto& r : dump.records)
                position = std::max<long>(position, static_cast<long>(r.position) + 1);
        }
        const ReprTable table = mean_token_reprs(dump, layer, position, window, g.n);
        auto [sub, rows] = valid_submatrix(table);
        const int k = static_cast<int>(
            std::min<Eigen::Index>(3, std::min<Eigen::Index>(sub.rows() - 1, sub.cols())));
        if (k >= 1) {
            const PcaResult p = pca(sub, k);
            detail::write_pca_csv(detail::join_path(out, "pca_scores.csv"), p.scores, rows,
                                  vocab_ptr);
            files.push_back("pca_scores.csv");
        }
    }

    write_text(detail::join_path(out, "config.resolved.toml"), cfg.snapshot());
    files.push_back("config.resolved.toml");
    write_manifest(out, files);
    return files;
}

// ---------------------------------------------------------------------------
// transition / scaling
// ---------------------------------------------------------------------------

namespace detail {

inline std::string breakpoint_json(const BreakpointFit& fit) {
    std::string j = "{";
    j += "\"t_c\": " + format_double(fit.knot_x);
    j += ", \"left_slope\": " + format_double(fit.left_slope);
    j += ", \"right_slope\": " + format_double(fit.right_slope);
    j += ", \"sse_two_piece\": " + format_double(fit.sse_two_piece);
    j += ", \"sse_single_line\": " + format_double(fit.sse_single_line);
    j += ", \"r2\": " + format_double(fit.r2);
    j += std::string(", \"degenerate_knot\": ") + (fit.degenerate_knot ? "true" : "false");
    j += "}";
    return j;
}

}  // namespace detail

inline std::vector<std::string> cmd_transition(const Config& cfg) {
    const std::string out = detail::require_out_dir(cfg);
    const GraphFamily family = family_from_name(cfg.get_string("family", "grid"));
    const long size = cfg.get_long("size", 0);
    if (size < 1) throw ArgumentError("transition: need size = <family size>");
    const Graph g = build_family_graph(family, size);
    const DgpKind kind = detail::kind_from_config(cfg, g);
    const std::string metric = cfg.get_string("metric", "coverage");
    const int num_seeds = static_cast<int>(cfg.get_long("seeds", 20));
    const std::uint64_t master_seed = static_cast<std::uint64_t>(cfg.get_long("master_seed", 0));
    const double threshold = cfg.get_double("threshold", 1.0);

    std::vector<std::string> files;
    std::string report = "{\n";
    report += "  \"family\": \"" + family_name(family) + "\",\n";
    report += "  \"size\": " + std::to_string(size) + ",\n";
    report += "  \"n\": " + std::to_string(g.n) + ",\n";
    report += "  \"kind\": \"" + dgp_kind_name(kind) + "\",\n";
    report += "  \"metric\": \"" + metric + "\",\n";
    report += "  \"source\": \"synthetic learner\",\n";

    if (metric == "coverage") {
        const auto cov = coverage_transition(g, kind, threshold, num_seeds, master_seed);
        report += "  \"threshold\": " + format_double(threshold) + ",\n";
        report += "  \"t_c\": " + format_double(cov.median_length) + ",\n";
        report += "  \"per_seed\": [";
        for (std::size_t i = 0; i < cov.per_seed.size(); ++i)
            report += (i ? ", " : "") + std::to_string(cov.per_seed[i]);
        report += "]\n";
    } else if (metric == "accuracy_knot") {
        OracleCurveOptions opts;
        std::vector<long> lengths = cfg.get_long_list("lengths");
        if (lengths.empty()) lengths = log_spaced_lengths(std::max<long>(2, g.n / 2), 50L * g.n, 16);
        opts.lengths = lengths;
        opts.embed_dim = static_cast<int>(cfg.get_long("embed_dim", 3));
        opts.noise = cfg.get_double("noise", 0.05);
        opts.jobs = static_cast<int>(cfg.get_long("jobs", 1));
        std::vector<std::uint64_t> seeds;
        for (int s = 0; s < num_seeds; ++s)
            seeds.push_back(derive_seed(master_seed, static_cast<std::uint64_t>(s)));
        const OracleRunResult run = run_oracle_pipeline(g, kind, seeds, opts);
        Curve curve = run.median_accuracy;
        const long clipped = clip_positive(curve);
        const BreakpointFit fit = fit_breakpoint(curve);

        CsvWriter csv("metric,context_length,value,seed");
        for (const auto& p : run.median_accuracy.points)
            csv.add_row({"accuracy", std::to_string(p.x), format_double(p.y), "median"});
        csv.save(detail::join_path(out, "accuracy_curve.csv"));
        files.push_back("accuracy_curve.csv");

        report += "  \"clipped_points\": " + std::to_string(clipped) + ",\n";
        report += "  \"t_c\": " + format_double(fit.knot_x) + ",\n";
        report += "  \"fit\": " + detail::breakpoint_json(fit) + "\n";
    } else {
        throw ArgumentError("transition: metric must be coverage or accuracy_knot");
    }
    report += "}\n";
    write_text(detail::join_path(out, "report.json"), report);
    files.push_back("report.json");
    write_text(detail::join_path(out, "config.resolved.toml"), cfg.snapshot());
    files.push_back("config.resolved.toml");
    write_manifest(out, files);
    return files;
}

inline std::vector<std::string> cmd_scaling(const Config& cfg) {
    const std::string out = detail::require_out_dir(cfg);
    const GraphFamily family = family_from_name(cfg.get_string("family", "grid"));
    const std::vector<long> sizes = cfg.get_long_list("sizes");
    if (sizes.size() < 3) throw ArgumentError("scaling: need at least 3 sizes");
    const Graph probe = build_family_graph(family, sizes.front());
    const DgpKind kind = detail::kind_from_config(cfg, probe);
    const ScalingMetric metric = metric_from_name(cfg.get_string("metric", "coverage"));

    ScalingOptions opts;
    opts.num_seeds = static_cast<int>(cfg.get_long("seeds", 20));
    opts.master_seed = static_cast<std::uint64_t>(cfg.get_long("master_seed", 0));
    opts.threshold = cfg.get_double("threshold", 1.0);
    opts.embed_dim = static_cast<int>(cfg.get_long("embed_dim", 3));
    opts.noise = cfg.get_double("noise", 0.05);
    opts.jobs = static_cast<int>(cfg.get_long("jobs", 1));

    const ScalingResult result = scaling_experiment(family, sizes, kind, metric, opts);

    std::vector<std::string> files;
    {
        CsvWriter csv(metric == ScalingMetric::coverage
                          ? "size,n,seed_index,t_c"
                          : "size,n,context_length,accuracy");
        for (const auto& sr : result.per_size) {
            if (metric == ScalingMetric::coverage) {
                for (std::size_t i = 0; i < sr.per_seed_lengths.size(); ++i)
                    csv.add_row({std::to_string(sr.size_param), std::to_string(sr.n_nodes),
                                 std::to_string(i), std::to_string(sr.per_seed_lengths[i])});
            } else {
                for (const auto& p : sr.accuracy.points)
                    csv.add_row({std::to_string(sr.size_param), std::to_string(sr.n_nodes),
                                 std::to_string(p.x), format_double(p.y)});
            }
        }
        csv.save(detail::join_path(out, "curves.csv"));
        files.push_back("curves.csv");
    }

    {
        // log-log scatter of (n, T_c) with the fitted line and reference slopes
        SvgPlot plot(520, 400, "transition point vs graph size (log-log)");
        plot.set_log_axes(true, true);
        std::vector<std::pair<double, double>> pts;
        for (const auto& [n, tc] : result.fit.points) pts.emplace_back(n, tc);
        const double n0 = result.fit.points.front().first;
        const double n1 = result.fit.points.back().first;
        auto line_for = [&](double exponent, double anchor_tc) {
            std::vector<std::pair<double, double>> line;
            line.emplace_back(n0, anchor_tc);
            line.emplace_back(n1, anchor_tc * std::pow(n1 / n0, exponent));
            return line;
        };
        const double fit_t0 = result.fit.prefactor * std::pow(n0, result.fit.exponent);
        plot.add_line(line_for(result.fit.exponent, fit_t0), "#1f77b4",
                      "fit " + format_double(result.fit.exponent).substr(0, 5));
        plot.add_line(line_for(0.5, fit_t0), "#2ca02c", "ref 0.5");
        plot.add_line(line_for(0.65, fit_t0), "#ff7f0e", "ref 0.65");
        plot.add_line(line_for(0.490, fit_t0), "#d62728", "llm grid ref 0.490");
        plot.add_points(std::move(pts), "#000000");
        write_text(detail::join_path(out, "scaling.svg"), plot.str());
        files.push_back("scaling.svg");
    }

    {
        std::string report = "{\n";
        report += "  \"family\": \"" + family_name(family) + "\",\n";
        report += "  \"kind\": \"" + dgp_kind_name(kind) + "\",\n";
        report += "  \"metric\": \"" +
                  std::string(metric == ScalingMetric::coverage ? "coverage" : "accuracy_knot") +
                  "\",\n";
        report += "  \"source\": \"synthetic learner\",\n";
        if (metric == ScalingMetric::coverage)
            report += "  \"threshold\": " + format_double(opts.threshold) + ",\n";
        report += "  \"exponent\": " + format_double(result.fit.exponent) + ",\n";
        report += "  \"prefactor\": " + format_double(result.fit.prefactor) + ",\n";
        report += "  \"r2\": " + format_double(result.fit.r2) + ",\n";
        report += "  \"references\": {\"llm_grid\": 0.49, \"percolation_hex\": 0.65, "
                  "\"percolation_square\": 0.5},\n";
        report += "  \"per_size\": [\n";
        for (std::size_t i = 0; i < result.per_size.size(); ++i) {
            const auto& sr = result.per_size[i];
            report += "    {\"size\": " + std::to_string(sr.size_param) +
                      ", \"n\": " + std::to_string(sr.n_nodes) +
                      ", \"t_c\": " + format_double(sr.t_c);
            if (sr.fit) report += ", \"fit\": " + detail::breakpoint_json(*sr.fit);
            report += i + 1 < result.per_size.size() ? "},\n" : "}\n";
        }
        report += "  ]\n}\n";
        write_text(detail::join_path(out, "report.json"), report);
        files.push_back("report.json");
    }

    write_text(detail::join_path(out, "config.resolved.toml"), cfg.snapshot());
    files.push_back("config.resolved.toml");
    write_manifest(out, files);
    return files;
}

}  // namespace ictrace
