#pragma once

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ictrace/common.hpp"

namespace ictrace {

struct DumpRecord {
    std::uint32_t sequence_id = 0;
    std::uint32_t position = 0;
    std::uint32_t token_id = 0;
    std::uint32_t layer = 0;
};

/// Per-position activation vectors, one d-dimensional row per record.
/// Record i's vector lives at values[i*d .. i*d + d).
struct ActivationDump {
    std::uint32_t d = 0;
    std::vector<DumpRecord> records;
    std::vector<float> values;

    std::vector<std::uint32_t> layers() const {
        std::set<std::uint32_t> seen;
        for (const auto& r : records) seen.insert(r.layer);
        return {seen.begin(), seen.end()};
    }

    int max_token_id() const {
        int m = -1;
        for (const auto& r : records) m = std::max(m, static_cast<int>(r.token_id));
        return m;
    }
};

/// Mean token representations at one (layer, context length). Rows with zero
/// coverage carry no information and are excluded from energy and PCA.
struct ReprTable {
    Matrix values;                // n x d
    std::vector<long> coverage;   // observations per token inside the window
    int layer = 0;
    long context_length = 0;

    std::vector<int> valid_rows() const {
        std::vector<int> rows;
        for (std::size_t i = 0; i < coverage.size(); ++i)
            if (coverage[i] > 0) rows.push_back(static_cast<int>(i));
        return rows;
    }
};

inline ReprTable repr_table_from_matrix(Matrix values, int layer = 0, long context_length = 0) {
    ReprTable t;
    t.coverage.assign(static_cast<std::size_t>(values.rows()), 1);
    t.values = std::move(values);
    t.layer = layer;
    t.context_length = context_length;
    return t;
}

/// Valid-row submatrix together with the original row indices.
inline std::pair<Matrix, std::vector<int>> valid_submatrix(const ReprTable& table) {
    const std::vector<int> rows = table.valid_rows();
    Matrix m(static_cast<Eigen::Index>(rows.size()), table.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = table.values.row(rows[i]);
    return {std::move(m), rows};
}

namespace detail {

inline void accumulate_window(const ActivationDump& dump, std::uint32_t layer, long position,
                              long window, long sequence_filter, Matrix& sums,
                              std::vector<long>& counts) {
    const long lo = std::max<long>(0, position - window);
    const std::uint32_t d = dump.d;
    for (std::size_t i = 0; i < dump.records.size(); ++i) {
        const DumpRecord& r = dump.records[i];
        if (r.layer != layer) continue;
        if (sequence_filter >= 0 && static_cast<long>(r.sequence_id) != sequence_filter) continue;
        const long pos = static_cast<long>(r.position);
        if (pos < lo || pos >= position) continue;  // window is strictly preceding
        const float* vec = dump.values.data() + i * d;
        for (std::uint32_t c = 0; c < d; ++c) sums(r.token_id, c) += vec[c];
        ++counts[r.token_id];
    }
}

inline ReprTable mean_reprs_impl(const ActivationDump& dump, int layer, long position, long window,
                                 int n, long sequence_filter) {
    if (window < 1) throw ArgumentError("mean_token_reprs: window must be >= 1");
    if (position < 0) throw ArgumentError("mean_token_reprs: position must be >= 0");
    const auto available = dump.layers();
    if (!std::binary_search(available.begin(), available.end(), static_cast<std::uint32_t>(layer))) {
        std::string names;
        for (auto l : available) names += (names.empty() ? "" : ", ") + std::to_string(l);
        throw ArgumentError("mean_token_reprs: layer " + std::to_string(layer) +
                            " not in dump (available: " + names + ")");
    }
    long max_pos = -1;
    for (const auto& r : dump.records) max_pos = std::max(max_pos, static_cast<long>(r.position));
    if (position > max_pos + 1)
        throw ArgumentError("mean_token_reprs: position " + std::to_string(position) +
                            " beyond last recorded position " + std::to_string(max_pos));
    if (n < 0) n = dump.max_token_id() + 1;
    if (n < 1) throw ArgumentError("mean_token_reprs: no tokens in dump");

    ReprTable table;
    table.layer = layer;
    table.context_length = position;
    table.values = Matrix::Zero(n, dump.d);
    table.coverage.assign(static_cast<std::size_t>(n), 0);
    std::vector<long> counts(static_cast<std::size_t>(n), 0);
    accumulate_window(dump, static_cast<std::uint32_t>(layer), position, window, sequence_filter,
                      table.values, counts);
    for (int t = 0; t < n; ++t) {
        table.coverage[static_cast<std::size_t>(t)] = counts[static_cast<std::size_t>(t)];
        if (counts[static_cast<std::size_t>(t)] > 0)
            table.values.row(t) /= static_cast<double>(counts[static_cast<std::size_t>(t)]);
    }
    return table;
}

}  // namespace detail

/// Mean representation per token over the window [position - window, position),
/// pooled across every sequence in the dump. When the context is shorter than
/// the window the whole prefix is used.
inline ReprTable mean_token_reprs(const ActivationDump& dump, int layer, long position, long window,
                                  int n = -1) {
    return detail::mean_reprs_impl(dump, layer, position, window, n, -1);
}

/// Same, restricted to a single sequence.
inline ReprTable mean_token_reprs_sequence(const ActivationDump& dump, std::uint32_t sequence_id,
                                           int layer, long position, long window, int n = -1) {
    return detail::mean_reprs_impl(dump, layer, position, window, n,
                                   static_cast<long>(sequence_id));
}

// ---------------------------------------------------------------------------
// Binary dump format, little-endian:
//   "ICRD" | u32 version=1 | u32 d | u32 layer_count | u64 record_count
//   then per record: u32 sequence_id, u32 position, u32 token_id, u32 layer,
//   d x f32.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const std::string& buf, std::size_t& offset, const char* what) {
    if (offset + sizeof(T) > buf.size())
        throw FormatError(std::string("activation dump: truncated reading ") + what +
                          " at byte " + std::to_string(offset) + " (have " +
                          std::to_string(buf.size()) + " bytes, need " +
                          std::to_string(offset + sizeof(T)) + ")");
    T value;
    std::memcpy(&value, buf.data() + offset, sizeof(T));
    offset += sizeof(T);
    return value;
}

}  // namespace detail

inline std::string encode_dump(const ActivationDump& dump) {
    if (dump.values.size() != dump.records.size() * dump.d)
        throw ArgumentError("encode_dump: value buffer does not match record count * d");
    std::string out;
    out.reserve(20 + dump.records.size() * (16 + 4 * dump.d));
    out += "ICRD";
    detail::put_le<std::uint32_t>(out, 1);
    detail::put_le<std::uint32_t>(out, dump.d);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dump.layers().size()));
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(dump.records.size()));
    for (std::size_t i = 0; i < dump.records.size(); ++i) {
        const DumpRecord& r = dump.records[i];
        detail::put_le(out, r.sequence_id);
        detail::put_le(out, r.position);
        detail::put_le(out, r.token_id);
        detail::put_le(out, r.layer);
        for (std::uint32_t c = 0; c < dump.d; ++c)
            detail::put_le(out, dump.values[i * dump.d + c]);
    }
    return out;
}

inline ActivationDump decode_dump(const std::string& buf) {
    std::size_t offset = 0;
    if (buf.size() < 4 || buf.compare(0, 4, "ICRD") != 0)
        throw FormatError("activation dump: bad magic at byte 0 (expected \"ICRD\")");
    offset = 4;
    const auto version = detail::get_le<std::uint32_t>(buf, offset, "version");
    if (version != 1)
        throw FormatError("activation dump: unsupported version " + std::to_string(version));
    ActivationDump dump;
    dump.d = detail::get_le<std::uint32_t>(buf, offset, "dimension");
    if (dump.d == 0) throw FormatError("activation dump: dimension d = 0 in header");
    detail::get_le<std::uint32_t>(buf, offset, "layer count");
    const auto record_count = detail::get_le<std::uint64_t>(buf, offset, "record count");
    const std::size_t record_bytes = 16 + 4 * static_cast<std::size_t>(dump.d);
    if (buf.size() - offset != record_count * record_bytes)
        throw FormatError("activation dump: payload is " + std::to_string(buf.size() - offset) +
                          " bytes, expected " + std::to_string(record_count * record_bytes) +
                          " for " + std::to_string(record_count) + " records");
    dump.records.reserve(record_count);
    dump.values.reserve(record_count * dump.d);
    std::map<std::pair<std::uint32_t, std::uint32_t>, long> last_position;
    for (std::uint64_t i = 0; i < record_count; ++i) {
        DumpRecord r;
        r.sequence_id = detail::get_le<std::uint32_t>(buf, offset, "sequence id");
        r.position = detail::get_le<std::uint32_t>(buf, offset, "position");
        r.token_id = detail::get_le<std::uint32_t>(buf, offset, "token id");
        r.layer = detail::get_le<std::uint32_t>(buf, offset, "layer");
        auto& last = last_position.try_emplace({r.sequence_id, r.layer}, -1).first->second;
        if (static_cast<long>(r.position) <= last)
            throw FormatError("activation dump: positions not strictly increasing for sequence " +
                              std::to_string(r.sequence_id) + " layer " + std::to_string(r.layer) +
                              " near byte " + std::to_string(offset));
        last = static_cast<long>(r.position);
        dump.records.push_back(r);
        for (std::uint32_t c = 0; c < dump.d; ++c)
            dump.values.push_back(detail::get_le<float>(buf, offset, "activation value"));
    }
    return dump;
}

inline void write_dump(const ActivationDump& dump, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("write_dump: cannot open " + path);
    const std::string encoded = encode_dump(dump);
    out.write(encoded.data(), static_cast<std::streamsize>(encoded.size()));
    if (!out) throw FormatError("write_dump: short write to " + path);
}

inline ActivationDump ingest_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("ingest_dump: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_dump(buf);
}

}  // namespace ictrace
