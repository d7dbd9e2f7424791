// Command-line front end: graph/context generation, representation analysis,
// spectral exports, and transition/scaling fits. Every command is a pure
// function of its resolved configuration, so identical invocations produce
// byte-identical output directories.

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ictrace/ictrace.hpp"

namespace {

using ictrace::Config;

/// Collects flag values per subcommand; after parsing, flags present on the
/// command line override keys loaded from --config.
struct FlagSet {
    CLI::App* cmd;
    struct Entry {
        CLI::Option* option;
        std::string key;
        std::shared_ptr<std::string> value;
    };
    std::vector<Entry> entries;

    void add(const std::string& flag, const std::string& key, const std::string& help) {
        auto value = std::make_shared<std::string>();
        CLI::Option* option = cmd->add_option(flag, *value, help);
        entries.push_back({option, key, value});
    }

    void apply(Config& cfg) const {
        for (const auto& e : entries)
            if (e.option->count() > 0) cfg.set(e.key, *e.value);
    }
};

void bind_common(FlagSet& b) {
    b.add("--out", "out", "output directory");
    b.add("--jobs", "jobs", "parallel workers");
    b.add("--master-seed", "master_seed", "root seed for derived streams");
}

void bind_graph_flags(FlagSet& b) {
    b.add("--topology", "topology", "ring | grid | hex");
    b.add("--graph", "graph", "graph json path (custom graphs)");
    b.add("-n,--nodes", "n", "ring node count");
    b.add("-m,--side", "m", "grid side length");
    b.add("--rows", "rows", "hex rows");
    b.add("--cols", "cols", "hex cols");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"in-context graph tracing toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file; flags override");

    auto* gen = app.add_subcommand("gen", "generate graph, vocabulary, and context files");
    auto* analyze =
        app.add_subcommand("analyze", "energy/accuracy/PCA curves from contexts or a dump");
    auto* spectral = app.add_subcommand("spectral", "spectral embedding and PCA exports");
    auto* transition = app.add_subcommand("transition", "transition point for one graph size");
    auto* scaling = app.add_subcommand("scaling", "power-law fit of transition points across sizes");

    FlagSet gen_b{gen, {}};
    bind_common(gen_b);
    bind_graph_flags(gen_b);
    gen_b.add("--kind", "kind", "walk | pairs (default: pairs for rings, walk otherwise)");
    gen_b.add("--length", "length", "tokens per sequence");
    gen_b.add("--seeds", "seeds", "seed list 0,1,2 or count");
    gen_b.add("--label-seed", "label_seed", "seed for the node-label permutation");
    gen_b.add("--label-pool", "label_pool", "newline-separated label pool file");

    FlagSet an_b{analyze, {}};
    bind_common(an_b);
    an_b.add("--in", "in", "gen output directory");
    an_b.add("--graph", "graph", "graph json path (overrides in/graph.json)");
    an_b.add("--lengths", "lengths", "evaluation context lengths, e.g. 10,100,1000");
    an_b.add("--source", "source", "oracle | dump");
    an_b.add("--dump", "dump", "activation dump path (source = dump)");
    an_b.add("--layer", "layer", "dump layer to analyze");
    an_b.add("--window", "window", "mean-representation window N_w (default 200)");
    an_b.add("--seeds", "seeds", "restrict to these master seeds");
    an_b.add("--embed-dim", "embed_dim", "synthetic learner embedding dimension");
    an_b.add("--noise", "noise", "synthetic learner noise scale");
    an_b.add("--predictions", "predictions", "prediction jsonl to score");
    an_b.add("--pc-dims", "pc_dims", "PC indices for per-subspace energy, e.g. 3,4");

    FlagSet sp_b{spectral, {}};
    bind_common(sp_b);
    bind_graph_flags(sp_b);
    sp_b.add("--vocab", "vocab", "vocab json for labels");
    sp_b.add("--svg", "svg", "emit svg scatter (1/0, default 1)");
    sp_b.add("--dump", "dump", "activation dump for pca scores");
    sp_b.add("--layer", "layer", "dump layer");
    sp_b.add("--length", "length", "context position for the dump window");
    sp_b.add("--window", "window", "window N_w");

    FlagSet tr_b{transition, {}};
    bind_common(tr_b);
    tr_b.add("--family", "family", "ring | grid | hex");
    tr_b.add("--size", "size", "family size parameter");
    tr_b.add("--kind", "kind", "walk | pairs");
    tr_b.add("--metric", "metric", "coverage | accuracy_knot");
    tr_b.add("--threshold", "threshold", "largest-component fraction (coverage)");
    tr_b.add("--seeds", "seeds", "number of seeds");
    tr_b.add("--lengths", "lengths", "context lengths (accuracy_knot)");
    tr_b.add("--embed-dim", "embed_dim", "synthetic learner embedding dimension");
    tr_b.add("--noise", "noise", "synthetic learner noise scale");

    FlagSet sc_b{scaling, {}};
    bind_common(sc_b);
    sc_b.add("--family", "family", "ring | grid | hex");
    sc_b.add("--sizes", "sizes", "family sizes, e.g. 3,4,5,6,7,8");
    sc_b.add("--kind", "kind", "walk | pairs");
    sc_b.add("--metric", "metric", "coverage | accuracy_knot");
    sc_b.add("--threshold", "threshold", "largest-component fraction (coverage)");
    sc_b.add("--seeds", "seeds", "number of seeds");
    sc_b.add("--embed-dim", "embed_dim", "synthetic learner embedding dimension");
    sc_b.add("--noise", "noise", "synthetic learner noise scale");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Config cfg;
        if (!config_path.empty()) cfg = Config::parse(ictrace::read_text(config_path));
        CLI::App* active = app.get_subcommands().front();
        for (const FlagSet* b : {&gen_b, &an_b, &sp_b, &tr_b, &sc_b})
            if (b->cmd == active) b->apply(cfg);

        const std::string name = active->get_name();
        std::vector<std::string> files;
        if (name == "gen") files = ictrace::cmd_gen(cfg);
        else if (name == "analyze") files = ictrace::cmd_analyze(cfg);
        else if (name == "spectral") files = ictrace::cmd_spectral(cfg);
        else if (name == "transition") files = ictrace::cmd_transition(cfg);
        else if (name == "scaling") files = ictrace::cmd_scaling(cfg);
        for (const auto& f : files) std::cout << f << "\n";
        std::cout << "manifest.json\n";
        return 0;
    } catch (const ictrace::ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ictrace::FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const ictrace::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
