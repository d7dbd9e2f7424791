#include <cstdlib>
#include <filesystem>

#include <catch2/catch_amalgamated.hpp>

#include "ictrace/io.hpp"

using namespace ictrace;

namespace {

const std::string cli = ICTRACE_CLI_PATH;

int run(const std::string& args) {
    const std::string command = cli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("cli gen then analyze round trip") {
    const auto gen_dir = fresh_dir("ictrace_cli_gen");
    REQUIRE(run("gen --topology ring -n 8 --length 100 --seeds 2 --out " + gen_dir.string()) == 0);
    REQUIRE(std::filesystem::exists(gen_dir / "graph.json"));
    REQUIRE(std::filesystem::exists(gen_dir / "contexts_seed0.jsonl"));
    REQUIRE(std::filesystem::exists(gen_dir / "contexts_seed1.jsonl"));
    REQUIRE(std::filesystem::exists(gen_dir / "manifest.json"));

    SECTION("re-running gen reproduces identical bytes") {
        const auto second = fresh_dir("ictrace_cli_gen2");
        REQUIRE(run("gen --topology ring -n 8 --length 100 --seeds 2 --out " + second.string()) ==
                0);
        REQUIRE(read_text((gen_dir / "contexts_seed0.jsonl").string()) ==
                read_text((second / "contexts_seed0.jsonl").string()));
        REQUIRE(read_text((gen_dir / "manifest.json").string()) ==
                read_text((second / "manifest.json").string()));
        std::filesystem::remove_all(second);
    }

    SECTION("analyze produces identical manifests across runs") {
        const auto out_a = fresh_dir("ictrace_cli_an_a");
        const auto out_b = fresh_dir("ictrace_cli_an_b");
        const std::string args = "analyze --in " + gen_dir.string() + " --lengths 10,40,100 --out ";
        REQUIRE(run(args + out_a.string()) == 0);
        REQUIRE(run(args + out_b.string()) == 0);
        REQUIRE(read_text((out_a / "manifest.json").string()) ==
                read_text((out_b / "manifest.json").string()));
        std::filesystem::remove_all(out_a);
        std::filesystem::remove_all(out_b);
    }

    std::filesystem::remove_all(gen_dir);
}

TEST_CASE("cli exit codes") {
    SECTION("usage errors exit 2") {
        REQUIRE(run("gen --topology dodecahedron -n 5 --length 10 --out /tmp/ictrace_cli_bad") == 2);
        REQUIRE(run("gen --topology ring -n 2 --length 10 --out /tmp/ictrace_cli_bad") == 2);
        REQUIRE(run("scaling --family grid --sizes 3,4 --out /tmp/ictrace_cli_bad") == 2);
        REQUIRE(run("nonsense-subcommand") == 2);
    }

    SECTION("data errors exit 3") {
        const auto dir = fresh_dir("ictrace_cli_data_err");
        write_text((dir / "graph.json").string(), "{not json");
        REQUIRE(run("spectral --graph " + (dir / "graph.json").string() + " --out " +
                    (dir / "out").string()) == 3);
        std::filesystem::remove_all(dir);
    }

    SECTION("config file plus flag overrides") {
        const auto dir = fresh_dir("ictrace_cli_config");
        write_text((dir / "run.toml").string(),
                   "topology = ring\nn = 6\nlength = 30\nseeds = 1\n");
        REQUIRE(run("--config " + (dir / "run.toml").string() + " gen --length 40 --out " +
                    (dir / "out").string()) == 0);
        const std::string snapshot = read_text((dir / "out" / "config.resolved.toml").string());
        REQUIRE(snapshot.find("length = 40") != std::string::npos);  // flag wins
        REQUIRE(snapshot.find("topology = ring") != std::string::npos);
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("cli spectral and transition smoke") {
    const auto out = fresh_dir("ictrace_cli_spectral");
    REQUIRE(run("spectral --topology hex --rows 3 --cols 4 --out " + out.string()) == 0);
    REQUIRE(std::filesystem::exists(out / "embedding.csv"));
    REQUIRE(std::filesystem::exists(out / "embedding.svg"));
    std::filesystem::remove_all(out);

    const auto tdir = fresh_dir("ictrace_cli_transition");
    REQUIRE(run("transition --family ring --size 8 --metric coverage --seeds 5 --out " +
                tdir.string()) == 0);
    REQUIRE(std::filesystem::exists(tdir / "report.json"));
    std::filesystem::remove_all(tdir);
}
