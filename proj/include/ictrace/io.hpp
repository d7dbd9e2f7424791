#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ictrace/dgp.hpp"
#include "ictrace/graph.hpp"
#include "ictrace/metrics.hpp"

namespace ictrace {

// ---------------------------------------------------------------------------
// Graph JSON: {"edges": [[u, v], ...], "n": int, "topology": string}
// (object keys serialize alphabetically, edges sorted -> stable bytes)
// ---------------------------------------------------------------------------

inline std::string encode_graph(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.n;
    j["topology"] = topology_name(g.topology);
    auto edges = nlohmann::json::array();
    for (auto [u, v] : g.edges) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    return j.dump();
}

inline Graph decode_graph(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("graph json: ") + e.what());
    }
    try {
        const int n = j.at("n").get<int>();
        const Topology topology = topology_from_name(j.at("topology").get<std::string>());
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges"))
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        return make_graph(n, std::move(edges), topology);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("graph json: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Context JSON Lines, one object per sequence:
// {"graph": id, "kind": "walk"|"pairs", "labels": [...]?, "seed": int,
//  "tokens": [int, ...]}
// ---------------------------------------------------------------------------

inline std::string encode_context_line(const ContextSequence& seq,
                                       const Vocabulary* vocab = nullptr) {
    nlohmann::json j;
    j["graph"] = seq.graph_ref;
    j["kind"] = dgp_kind_name(seq.kind);
    j["seed"] = seq.seed;
    j["tokens"] = seq.tokens;
    if (vocab != nullptr) {
        auto labels = nlohmann::json::array();
        for (int t : seq.tokens) labels.push_back(vocab->labels.at(static_cast<std::size_t>(t)));
        j["labels"] = std::move(labels);
    }
    return j.dump();
}

struct DecodedContext {
    ContextSequence sequence;
    std::vector<std::string> labels;  // empty when the line carries none
};

inline DecodedContext decode_context_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("context jsonl: ") + e.what());
    }
    try {
        DecodedContext out;
        out.sequence.graph_ref = j.at("graph").get<std::string>();
        out.sequence.kind = dgp_kind_from_name(j.at("kind").get<std::string>());
        out.sequence.seed = j.at("seed").get<std::uint64_t>();
        out.sequence.tokens = j.at("tokens").get<std::vector<int>>();
        if (j.contains("labels")) out.labels = j.at("labels").get<std::vector<std::string>>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("context jsonl: ") + e.what());
    }
}

inline void write_contexts(const PromptBatch& batch, const std::string& path,
                           const Vocabulary* vocab = nullptr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("write_contexts: cannot open " + path);
    for (const auto& seq : batch.sequences) out << encode_context_line(seq, vocab) << '\n';
}

inline std::vector<DecodedContext> read_contexts(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_contexts: cannot open " + path);
    std::vector<DecodedContext> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(decode_context_line(line));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prediction JSON Lines: {"step": int, "current": int, "probs": [float, ...]}
// ---------------------------------------------------------------------------

struct PredictionRecord {
    long step = 0;
    int current = 0;
    PredictionDistribution dist;
};

inline std::vector<PredictionRecord> read_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_predictions: cannot open " + path);
    std::vector<PredictionRecord> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            PredictionRecord rec;
            rec.step = j.at("step").get<long>();
            rec.current = j.at("current").get<int>();
            rec.dist.probs = j.at("probs").get<std::vector<double>>();
            rec.dist.source = PredictionSource::ingested;
            validate(rec.dist);
            out.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("predictions jsonl line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ArgumentError& e) {
            throw FormatError("predictions jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("write_text: cannot open " + path);
    out << text;
    if (!out) throw FormatError("write_text: short write to " + path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_text: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// CSV with a fixed header; all doubles go through format_double so repeated
/// runs emit identical bytes.
class CsvWriter {
public:
    explicit CsvWriter(std::string header) { rows_.push_back(std::move(header)); }

    void add_row(const std::vector<std::string>& cells) {
        std::string row;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) row += ',';
            row += cells[i];
        }
        rows_.push_back(std::move(row));
    }

    std::string str() const {
        std::string out;
        for (const auto& row : rows_) {
            out += row;
            out += '\n';
        }
        return out;
    }

    void save(const std::string& path) const { write_text(path, str()); }

private:
    std::vector<std::string> rows_;
};

/// Hash listing of every file a command produced, written last so a rerun is
/// checkable by comparing one file.
inline void write_manifest(const std::string& out_dir, const std::vector<std::string>& files) {
    std::vector<std::string> sorted = files;
    std::sort(sorted.begin(), sorted.end());
    std::string body = "{\n  \"files\": [\n";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const std::string content = read_text((std::filesystem::path(out_dir) / sorted[i]).string());
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        body += "    {\"bytes\": " + std::to_string(content.size()) + ", \"hash\": \"fnv1a64:" +
                hash + "\", \"path\": \"" + sorted[i] + "\"}";
        body += i + 1 < sorted.size() ? ",\n" : "\n";
    }
    body += "  ]\n}\n";
    write_text((std::filesystem::path(out_dir) / "manifest.json").string(), body);
}

}  // namespace ictrace
