#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "omniengine/stream_format.hpp"

namespace omni {

struct MinHashParams {
    int k = 256;       // hash count
    int shingle_width = 5;  // words per shingle
    uint64_t seed = 0;

    bool operator==(const MinHashParams&) const = default;
};

// k-permutation document fingerprint. Position-wise agreement between two
// signatures built with the same params is an unbiased Jaccard estimate of
// the underlying shingle sets.
struct MinHashSignature {
    MinHashParams params;
    std::vector<uint64_t> values;  // size k
};

class DedupError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shingles are all `shingle_width`-word windows of the lowercased,
// whitespace-normalized text; texts shorter than one window contribute the
// whole text as a single shingle. Empty text (no words) is an error.
std::vector<std::string> text_shingles(std::string_view text, int shingle_width);

MinHashSignature minhash_signature(std::string_view text, const MinHashParams& params = {});

// Fraction of agreeing positions; params of both signatures must match.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

// LSH band index: signatures are cut into `bands` groups of `rows` values
// (bands * rows == k); documents sharing any band bucket become candidates.
// Either build exclusively then query read-only from many workers, or build
// per-worker indexes and merge().
class SignatureIndex {
public:
    SignatureIndex(int bands, int rows);

    void insert(const std::string& doc_id, const MinHashSignature& sig);
    // Distinct doc ids sharing at least one band bucket with `sig`.
    std::vector<std::string> candidates(const MinHashSignature& sig) const;
    // All candidate id pairs discovered across buckets (each pair once, a < b).
    std::vector<std::pair<std::string, std::string>> candidate_pairs() const;
    void merge(const SignatureIndex& other);

    int bands() const { return bands_; }
    int rows() const { return rows_; }
    size_t size() const { return inserted_; }

private:
    uint64_t band_key(int band, const MinHashSignature& sig) const;

    int bands_;
    int rows_;
    size_t inserted_ = 0;
    std::vector<std::unordered_map<uint64_t, std::vector<std::string>>> buckets_;
};

struct DedupConfig {
    MinHashParams minhash;
    int bands = 32;
    int rows = 8;
    double threshold = 0.8;
    unsigned workers = 1;
};

struct DuplicateGroup {
    int64_t component_id = 0;
    std::vector<std::string> member_ids;  // sorted
    std::string survivor_id;
};

struct DedupResult {
    std::vector<StreamDocument> survivors;  // input order preserved
    std::vector<DuplicateGroup> groups;     // only components with >= 2 members
};

// Connected components under estimate_jaccard >= threshold (edges found via
// the band index, then verified); each component keeps the latest timestamp,
// ties broken by lexicographically greatest id.
DedupResult dedup_corpus(const std::vector<StreamDocument>& docs, const DedupConfig& config = {});

std::string duplicate_groups_to_jsonl(const std::vector<DuplicateGroup>& groups);

// --- Image occurrence filtering -------------------------------------------

struct OccurrenceEntry {
    int64_t count = 0;
    std::vector<std::string> doc_ids;
};

// (phash, dhash) -> occurrence count and carrying documents.
class OccurrenceTable {
public:
    void add(uint64_t phash, uint64_t dhash, const std::string& doc_id);
    const std::map<std::pair<uint64_t, uint64_t>, OccurrenceEntry>& entries() const {
        return entries_;
    }

private:
    std::map<std::pair<uint64_t, uint64_t>, OccurrenceEntry> entries_;
};

// Keys occurring strictly more than `limit` times (10 occurrences survive,
// 11 do not).
std::vector<std::pair<uint64_t, uint64_t>> image_occurrence_filter(const OccurrenceTable& table,
                                                                   int64_t limit = 10);

}  // namespace omni
