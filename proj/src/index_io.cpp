#include "castsel/errors.hpp"
#include "castsel/index.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

namespace castsel {

namespace {

constexpr std::array<char, 8> kMagic{'C', 'A', 'S', 'T', 'I', 'D', 'X', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr int kStringsPerRecord = 6;

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            out_.push_back(static_cast<char>((v & 0x7f) | 0x80));
            v >>= 7;
        }
        out_.push_back(static_cast<char>(v));
    }
    void bytes(std::string_view s) { out_.append(s); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::uint64_t u64() { return fixed(8); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(fixed(4)); }
    std::uint64_t varint() {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            need(1);
            auto b = static_cast<std::uint8_t>(in_[pos_++]);
            v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
            if (!(b & 0x80)) return v;
        }
        throw InputError("index file: malformed varint at byte " + std::to_string(pos_));
    }
    std::string_view bytes(std::uint64_t n) {
        need(n);
        auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const noexcept { return pos_ == in_.size(); }

private:
    void need(std::uint64_t n) const {
        if (n > in_.size() - pos_) throw InputError("index file truncated at byte " + std::to_string(pos_));
    }
    std::uint64_t fixed(int n) {
        need(static_cast<std::uint64_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(in_[pos_++])) << (8 * i);
        return v;
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

std::vector<Fingerprint> sorted_keys(const ExemplarDatabase& db) {
    std::vector<Fingerprint> keys;
    keys.reserve(db.distinct_fingerprints());
    for (const auto& [fp, _] : db.inverted()) keys.push_back(fp);
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

} // namespace

std::string index_to_bytes(const ExemplarDatabase& db) {
    std::string pool;
    std::vector<std::array<std::pair<std::uint64_t, std::uint64_t>, kStringsPerRecord>> refs;
    refs.reserve(db.size());
    for (const auto& r : db.records()) {
        const std::array<std::string, kStringsPerRecord> fields{r.id,          r.source_lang, r.target_lang,
                                                                r.source_text, r.target_text, to_sexpr(r.tree)};
        auto& ref = refs.emplace_back();
        for (int i = 0; i < kStringsPerRecord; ++i) {
            ref[static_cast<std::size_t>(i)] = {pool.size(), fields[static_cast<std::size_t>(i)].size()};
            pool += fields[static_cast<std::size_t>(i)];
        }
    }
    const auto keys = sorted_keys(db);

    Writer w;
    w.bytes(std::string_view(kMagic.data(), kMagic.size()));
    w.u32(kVersion);
    w.u32(0);
    w.u64(db.size());
    w.u64(pool.size());
    w.u64(keys.size());
    w.bytes(pool);
    for (std::size_t p = 0; p < db.size(); ++p) {
        for (const auto& [off, len] : refs[p]) {
            w.u64(off);
            w.u64(len);
        }
        const auto& per_node = db.record(static_cast<Position>(p)).profile.per_node;
        w.u64(per_node.size());
        for (Fingerprint fp : per_node) w.u64(fp);
    }
    for (Fingerprint fp : keys) {
        auto list = db.postings(fp);
        w.u64(fp);
        w.varint(list.size());
        Position prev = 0;
        for (Position p : list) {
            w.varint(p - prev);
            prev = p;
        }
    }
    return w.take();
}

ExemplarDatabase index_from_bytes(std::string_view bytes) {
    Reader r(bytes);
    if (r.bytes(kMagic.size()) != std::string_view(kMagic.data(), kMagic.size())) {
        throw InputError("not an index file (bad magic)");
    }
    if (auto v = r.u32(); v != kVersion) throw InputError("unsupported index version " + std::to_string(v));
    r.u32();
    const std::uint64_t count = r.u64();
    const std::uint64_t pool_size = r.u64();
    const std::uint64_t list_count = r.u64();
    const std::string_view pool = r.bytes(pool_size);

    std::vector<ExemplarRecord> records;
    records.reserve(std::min<std::uint64_t>(count, bytes.size()));
    for (std::uint64_t p = 0; p < count; ++p) {
        std::array<std::string, kStringsPerRecord> f;
        for (auto& s : f) {
            std::uint64_t off = r.u64();
            std::uint64_t len = r.u64();
            if (off > pool.size() || len > pool.size() - off) throw InputError("index file: string ref out of range");
            s = std::string(pool.substr(off, len));
        }
        std::uint64_t nodes = r.u64();
        if (nodes > bytes.size() / 8) throw InputError("index file: implausible node count");
        std::vector<Fingerprint> per_node(nodes);
        for (auto& fp : per_node) fp = r.u64();

        TypedTree tree = parse_sexpr(f[5]);
        FingerprintProfile prof = profile_from_per_node(std::move(per_node));
        if (fingerprint_tree(tree) != prof) {
            throw InvariantError("index file: stored fingerprints of '" + f[0] + "' do not match its tree");
        }
        records.push_back({std::move(f[0]), std::move(f[1]), std::move(f[2]), std::move(f[3]), std::move(f[4]),
                           std::move(tree), std::move(prof)});
    }
    ExemplarDatabase db(std::move(records));

    if (list_count != db.distinct_fingerprints()) {
        throw InvariantError("index file: posting list count does not match record profiles");
    }
    for (std::uint64_t i = 0; i < list_count; ++i) {
        Fingerprint fp = r.u64();
        std::uint64_t len = r.varint();
        auto expected = db.postings(fp);
        if (len != expected.size()) throw InvariantError("index file: posting list for " + hex64(fp) + " differs");
        std::uint64_t pos = 0;
        for (std::uint64_t k = 0; k < len; ++k) {
            pos += r.varint();
            if (pos != expected[k]) throw InvariantError("index file: posting list for " + hex64(fp) + " differs");
        }
    }
    if (!r.at_end()) throw InputError("index file: trailing bytes");
    return db;
}

void save_index(const ExemplarDatabase& db, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write index file " + path.string());
    const std::string bytes = index_to_bytes(db);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("failed writing index file " + path.string());
}

ExemplarDatabase load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open index file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return index_from_bytes(ss.str());
}

std::string dump_index_json(const ExemplarDatabase& db) {
    nlohmann::ordered_json j;
    j["magic"] = std::string(kMagic.data(), kMagic.size());
    j["version"] = kVersion;
    j["record_count"] = db.size();
    auto& recs = j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : db.records()) {
        nlohmann::ordered_json o;
        o["id"] = r.id;
        o["source_lang"] = r.source_lang;
        o["target_lang"] = r.target_lang;
        o["source"] = r.source_text;
        o["target"] = r.target_text;
        o["tree"] = to_sexpr(r.tree);
        auto& fps = o["fingerprints"] = nlohmann::ordered_json::array();
        for (Fingerprint fp : r.profile.per_node) fps.push_back(hex64(fp));
        recs.push_back(std::move(o));
    }
    auto& lists = j["postings"] = nlohmann::ordered_json::object();
    for (Fingerprint fp : sorted_keys(db)) {
        auto span = db.postings(fp);
        lists[hex64(fp)] = std::vector<Position>(span.begin(), span.end());
    }
    return j.dump(2) + "\n";
}

} // namespace castsel
