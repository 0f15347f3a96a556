#include "omniengine/dedup.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "omniengine/hash.hpp"
#include "omniengine/queue.hpp"
#include "omniengine/words.hpp"

namespace omni {

std::vector<std::string> text_shingles(std::string_view text, int shingle_width) {
    if (shingle_width < 1) throw DedupError("shingle width must be >= 1");
    std::string lowered = lower_copy(text);
    auto words = split_words(lowered);
    if (words.empty()) throw DedupError("EmptyDocument: no words to shingle");

    std::vector<std::string> shingles;
    size_t w = static_cast<size_t>(shingle_width);
    if (words.size() < w) {
        std::string whole;
        for (size_t i = 0; i < words.size(); ++i) {
            if (i) whole += ' ';
            whole += words[i];
        }
        shingles.push_back(std::move(whole));
        return shingles;
    }
    shingles.reserve(words.size() - w + 1);
    for (size_t i = 0; i + w <= words.size(); ++i) {
        std::string shingle;
        for (size_t j = 0; j < w; ++j) {
            if (j) shingle += ' ';
            shingle += words[i + j];
        }
        shingles.push_back(std::move(shingle));
    }
    return shingles;
}

MinHashSignature minhash_signature(std::string_view text, const MinHashParams& params) {
    if (params.k < 16) throw DedupError("minhash k must be >= 16");
    auto shingles = text_shingles(text, params.shingle_width);

    MinHashSignature sig;
    sig.params = params;
    sig.values.assign(static_cast<size_t>(params.k), ~0ULL);
    for (const std::string& shingle : shingles) {
        // One base hash per shingle, remixed per slot: equivalent to a family
        // of independent keyed hashes but a single pass over the bytes.
        uint64_t base = hash64(shingle, params.seed);
        for (int i = 0; i < params.k; ++i) {
            uint64_t h = splitmix64(base ^ splitmix64(static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ULL + 1));
            if (h < sig.values[static_cast<size_t>(i)]) sig.values[static_cast<size_t>(i)] = h;
        }
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (!(a.params == b.params)) throw DedupError("signature parameter mismatch");
    if (a.values.size() != b.values.size()) throw DedupError("signature length mismatch");
    if (a.values.empty()) return 0.0;
    size_t agree = 0;
    for (size_t i = 0; i < a.values.size(); ++i) agree += a.values[i] == b.values[i];
    return static_cast<double>(agree) / static_cast<double>(a.values.size());
}

SignatureIndex::SignatureIndex(int bands, int rows) : bands_(bands), rows_(rows) {
    if (bands < 1 || rows < 1) throw DedupError("bands and rows must be >= 1");
    buckets_.resize(static_cast<size_t>(bands));
}

uint64_t SignatureIndex::band_key(int band, const MinHashSignature& sig) const {
    uint64_t key = 0x243f6a8885a308d3ULL ^ static_cast<uint64_t>(band);
    for (int r = 0; r < rows_; ++r) {
        key = splitmix64(key ^ sig.values[static_cast<size_t>(band * rows_ + r)]);
    }
    return key;
}

void SignatureIndex::insert(const std::string& doc_id, const MinHashSignature& sig) {
    if (static_cast<int>(sig.values.size()) != bands_ * rows_)
        throw DedupError("signature length does not match bands*rows");
    for (int b = 0; b < bands_; ++b) {
        buckets_[static_cast<size_t>(b)][band_key(b, sig)].push_back(doc_id);
    }
    ++inserted_;
}

std::vector<std::string> SignatureIndex::candidates(const MinHashSignature& sig) const {
    if (static_cast<int>(sig.values.size()) != bands_ * rows_)
        throw DedupError("signature length does not match bands*rows");
    std::set<std::string> out;
    for (int b = 0; b < bands_; ++b) {
        auto it = buckets_[static_cast<size_t>(b)].find(band_key(b, sig));
        if (it == buckets_[static_cast<size_t>(b)].end()) continue;
        out.insert(it->second.begin(), it->second.end());
    }
    return {out.begin(), out.end()};
}

std::vector<std::pair<std::string, std::string>> SignatureIndex::candidate_pairs() const {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& table : buckets_) {
        for (const auto& [key, ids] : table) {
            for (size_t i = 0; i < ids.size(); ++i) {
                for (size_t j = i + 1; j < ids.size(); ++j) {
                    if (ids[i] == ids[j]) continue;
                    auto pair = std::minmax(ids[i], ids[j]);
                    pairs.emplace(pair.first, pair.second);
                }
            }
        }
    }
    return {pairs.begin(), pairs.end()};
}

void SignatureIndex::merge(const SignatureIndex& other) {
    if (other.bands_ != bands_ || other.rows_ != rows_)
        throw DedupError("cannot merge indexes with different band geometry");
    for (int b = 0; b < bands_; ++b) {
        for (const auto& [key, ids] : other.buckets_[static_cast<size_t>(b)]) {
            auto& mine = buckets_[static_cast<size_t>(b)][key];
            mine.insert(mine.end(), ids.begin(), ids.end());
        }
    }
    inserted_ += other.inserted_;
}

namespace {

// Union-find over document indexes.
struct DisjointSet {
    std::vector<size_t> parent;
    explicit DisjointSet(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

DedupResult dedup_corpus(const std::vector<StreamDocument>& docs, const DedupConfig& config) {
    if (config.bands * config.rows != config.minhash.k)
        throw DedupError("bands*rows must equal minhash k");

    // Signatures in parallel; docs with no text never join any component.
    std::vector<std::optional<MinHashSignature>> sigs(docs.size());
    parallel_for(docs.size(), config.workers, [&](size_t i) {
        try {
            sigs[i] = minhash_signature(to_text_corpus(docs[i]), config.minhash);
        } catch (const DedupError&) {
            sigs[i] = std::nullopt;
        }
    });

    SignatureIndex index(config.bands, config.rows);
    std::unordered_map<std::string, size_t> by_id;
    for (size_t i = 0; i < docs.size(); ++i) {
        by_id.emplace(docs[i].id, i);
        if (sigs[i]) index.insert(docs[i].id, *sigs[i]);
    }

    DisjointSet components(docs.size());
    for (const auto& [id_a, id_b] : index.candidate_pairs()) {
        size_t a = by_id.at(id_a), b = by_id.at(id_b);
        if (estimate_jaccard(*sigs[a], *sigs[b]) >= config.threshold) components.unite(a, b);
    }

    // Survivor per component: max timestamp, ties by greatest id.
    std::unordered_map<size_t, size_t> survivor_of;  // root -> index
    for (size_t i = 0; i < docs.size(); ++i) {
        size_t root = components.find(i);
        auto [it, inserted] = survivor_of.emplace(root, i);
        if (inserted) continue;
        const StreamDocument& cur = docs[it->second];
        const StreamDocument& cand = docs[i];
        if (cand.meta.timestamp > cur.meta.timestamp ||
            (cand.meta.timestamp == cur.meta.timestamp && cand.id > cur.id)) {
            it->second = i;
        }
    }

    std::unordered_map<size_t, std::vector<size_t>> members;
    for (size_t i = 0; i < docs.size(); ++i) members[components.find(i)].push_back(i);

    DedupResult result;
    for (size_t i = 0; i < docs.size(); ++i) {
        if (survivor_of.at(components.find(i)) == i) result.survivors.push_back(docs[i]);
    }

    // Stable group report: components ordered by first member appearance.
    int64_t next_component = 0;
    for (size_t i = 0; i < docs.size(); ++i) {
        size_t root = components.find(i);
        auto& group_members = members[root];
        if (group_members.size() < 2 || group_members.front() != i) continue;
        DuplicateGroup group;
        group.component_id = next_component++;
        for (size_t m : group_members) group.member_ids.push_back(docs[m].id);
        std::sort(group.member_ids.begin(), group.member_ids.end());
        group.survivor_id = docs[survivor_of.at(root)].id;
        result.groups.push_back(std::move(group));
    }
    return result;
}

std::string duplicate_groups_to_jsonl(const std::vector<DuplicateGroup>& groups) {
    std::string out;
    for (const DuplicateGroup& group : groups) {
        nlohmann::ordered_json j;
        j["component_id"] = group.component_id;
        j["member_ids"] = group.member_ids;
        j["survivor_id"] = group.survivor_id;
        out += j.dump();
        out += '\n';
    }
    return out;
}

void OccurrenceTable::add(uint64_t phash, uint64_t dhash, const std::string& doc_id) {
    auto& entry = entries_[{phash, dhash}];
    ++entry.count;
    entry.doc_ids.push_back(doc_id);
}

std::vector<std::pair<uint64_t, uint64_t>> image_occurrence_filter(const OccurrenceTable& table,
                                                                   int64_t limit) {
    std::vector<std::pair<uint64_t, uint64_t>> out;
    for (const auto& [key, entry] : table.entries()) {
        if (entry.count > limit) out.push_back(key);
    }
    return out;
}

}  // namespace omni
