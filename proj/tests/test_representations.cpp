#include <filesystem>

#include <catch2/catch_amalgamated.hpp>

#include "ictrace/representations.hpp"
#include "ictrace/rng.hpp"

using namespace ictrace;

namespace {

void add_record(ActivationDump& dump, std::uint32_t seq, std::uint32_t pos, std::uint32_t token,
                std::uint32_t layer, std::initializer_list<float> vec) {
    dump.records.push_back({seq, pos, token, layer});
    dump.values.insert(dump.values.end(), vec.begin(), vec.end());
}

ActivationDump random_dump(std::uint32_t d, std::uint32_t sequences, std::uint32_t positions,
                           std::uint32_t layers, int n_tokens, SplitMix64& rng) {
    ActivationDump dump;
    dump.d = d;
    for (std::uint32_t s = 0; s < sequences; ++s) {
        for (std::uint32_t l = 0; l < layers; ++l) {
            for (std::uint32_t p = 0; p < positions; ++p) {
                dump.records.push_back(
                    {s, p, static_cast<std::uint32_t>(uniform_index(rng, static_cast<std::size_t>(n_tokens))), l});
                for (std::uint32_t c = 0; c < d; ++c)
                    dump.values.push_back(static_cast<float>(standard_normal(rng)));
            }
        }
    }
    return dump;
}

}  // namespace

TEST_CASE("mean token representations") {
    ActivationDump dump;
    dump.d = 2;
    add_record(dump, 0, 0, 7, 0, {0.0f, 0.0f});
    add_record(dump, 0, 1, 3, 0, {5.0f, 5.0f});
    add_record(dump, 0, 2, 7, 0, {2.0f, 4.0f});

    const ReprTable table = mean_token_reprs(dump, 0, 3, 200);
    REQUIRE(table.values.rows() == 8);
    REQUIRE(table.coverage[7] == 2);
    REQUIRE(table.values(7, 0) == Catch::Approx(1.0));
    REQUIRE(table.values(7, 1) == Catch::Approx(2.0));
    REQUIRE(table.coverage[3] == 1);
    REQUIRE(table.coverage[0] == 0);

    SECTION("window is strictly preceding") {
        // a single record at the query position contributes nothing
        const ReprTable at0 = mean_token_reprs(dump, 0, 0, 200);
        for (long c : at0.coverage) REQUIRE(c == 0);
        const ReprTable at2 = mean_token_reprs(dump, 0, 2, 200);
        REQUIRE(at2.coverage[7] == 1);  // only position 0
    }

    SECTION("window truncation") {
        const ReprTable recent = mean_token_reprs(dump, 0, 3, 1);
        REQUIRE(recent.coverage[7] == 1);
        REQUIRE(recent.values(7, 0) == Catch::Approx(2.0));
    }

    SECTION("errors") {
        REQUIRE_THROWS_WITH(mean_token_reprs(dump, 5, 3, 200),
                            Catch::Matchers::ContainsSubstring("available: 0"));
        REQUIRE_THROWS_AS(mean_token_reprs(dump, 0, 9, 200), ArgumentError);
        REQUIRE_THROWS_AS(mean_token_reprs(dump, 0, 3, 0), ArgumentError);
    }
}

TEST_CASE("batch pooling equals flat concatenation") {
    SplitMix64 rng(5);
    const ActivationDump dump = random_dump(3, 4, 30, 2, 6, rng);

    const ReprTable pooled = mean_token_reprs(dump, 1, 25, 10, 6);

    // oracle: flatten all in-window records across sequences and average
    Matrix sums = Matrix::Zero(6, 3);
    std::vector<long> counts(6, 0);
    for (std::size_t i = 0; i < dump.records.size(); ++i) {
        const auto& r = dump.records[i];
        if (r.layer != 1 || r.position < 15 || r.position >= 25) continue;
        for (int c = 0; c < 3; ++c) sums(r.token_id, c) += dump.values[i * 3 + c];
        ++counts[r.token_id];
    }
    for (int t = 0; t < 6; ++t) {
        REQUIRE(pooled.coverage[static_cast<std::size_t>(t)] == counts[static_cast<std::size_t>(t)]);
        if (counts[static_cast<std::size_t>(t)] == 0) continue;
        for (int c = 0; c < 3; ++c)
            REQUIRE(pooled.values(t, c) ==
                    Catch::Approx(sums(t, c) / counts[static_cast<std::size_t>(t)]).margin(1e-12));
    }

    SECTION("per-sequence mode matches its own filter") {
        const ReprTable solo = mean_token_reprs_sequence(dump, 2, 1, 25, 10, 6);
        Matrix s2 = Matrix::Zero(6, 3);
        std::vector<long> c2(6, 0);
        for (std::size_t i = 0; i < dump.records.size(); ++i) {
            const auto& r = dump.records[i];
            if (r.sequence_id != 2 || r.layer != 1 || r.position < 15 || r.position >= 25) continue;
            for (int c = 0; c < 3; ++c) s2(r.token_id, c) += dump.values[i * 3 + c];
            ++c2[r.token_id];
        }
        for (int t = 0; t < 6; ++t) {
            REQUIRE(solo.coverage[static_cast<std::size_t>(t)] == c2[static_cast<std::size_t>(t)]);
            if (c2[static_cast<std::size_t>(t)] > 0)
                REQUIRE(solo.values(t, 0) ==
                        Catch::Approx(s2(t, 0) / c2[static_cast<std::size_t>(t)]).margin(1e-12));
        }
    }
}

TEST_CASE("mean reprs are permutation equivariant") {
    SplitMix64 rng(9);
    ActivationDump dump = random_dump(2, 2, 40, 1, 5, rng);
    const ReprTable base = mean_token_reprs(dump, 0, 40, 20, 5);

    // relabel tokens by the permutation p(t) = (t + 2) % 5
    ActivationDump permuted = dump;
    for (auto& r : permuted.records) r.token_id = (r.token_id + 2) % 5;
    const ReprTable moved = mean_token_reprs(permuted, 0, 40, 20, 5);
    for (int t = 0; t < 5; ++t) {
        const int pt = (t + 2) % 5;
        REQUIRE(moved.coverage[static_cast<std::size_t>(pt)] ==
                base.coverage[static_cast<std::size_t>(t)]);
        if (base.coverage[static_cast<std::size_t>(t)] > 0)
            REQUIRE((moved.values.row(pt) - base.values.row(t)).norm() == 0.0);
    }
}

TEST_CASE("dump binary round trip") {
    SplitMix64 rng(123);
    const ActivationDump dump = random_dump(4, 3, 12, 2, 9, rng);
    const std::string encoded = encode_dump(dump);
    const ActivationDump decoded = decode_dump(encoded);
    REQUIRE(encode_dump(decoded) == encoded);
    REQUIRE(decoded.d == dump.d);
    REQUIRE(decoded.records.size() == dump.records.size());

    const auto tmp = std::filesystem::temp_directory_path() / "ictrace_dump_test.bin";
    write_dump(dump, tmp.string());
    const ActivationDump from_file = ingest_dump(tmp.string());
    REQUIRE(encode_dump(from_file) == encoded);
    std::filesystem::remove(tmp);
}

TEST_CASE("dump format errors") {
    SplitMix64 rng(7);
    const ActivationDump dump = random_dump(2, 1, 4, 1, 3, rng);
    const std::string encoded = encode_dump(dump);

    SECTION("truncation names expected and actual byte counts") {
        const std::string cut = encoded.substr(0, encoded.size() - 3);
        REQUIRE_THROWS_WITH(decode_dump(cut), Catch::Matchers::ContainsSubstring("expected"));
    }

    SECTION("bad magic") {
        std::string bad = encoded;
        bad[0] = 'X';
        REQUIRE_THROWS_WITH(decode_dump(bad), Catch::Matchers::ContainsSubstring("magic"));
    }

    SECTION("zero dimension header") {
        std::string bad = encoded;
        bad[8] = bad[9] = bad[10] = bad[11] = 0;  // d field
        REQUIRE_THROWS_AS(decode_dump(bad), FormatError);
    }

    SECTION("unsupported version") {
        std::string bad = encoded;
        bad[4] = 9;
        REQUIRE_THROWS_AS(decode_dump(bad), FormatError);
    }

    SECTION("non-increasing positions") {
        ActivationDump bad = dump;
        std::swap(bad.records[0], bad.records[1]);
        // swap the value blocks too so sizes stay coherent
        REQUIRE_THROWS_AS(decode_dump(encode_dump(bad)), FormatError);
    }
}
