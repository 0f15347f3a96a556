#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "omniengine/toml.hpp"

namespace omni {

// The four canonical pipeline stages. The circled-digit notation is the
// pipeline's own shorthand and appears in reports and plan strings.
enum class StageId {
    PreliminaryTextFilter = 1,  // ①
    Dedup = 2,                  // ②
    ImageDownloadFilter = 3,    // ③
    DetailedTextFilter = 4,     // ④
};

std::string_view stage_symbol(StageId id);  // ①②③④

enum class StageRateUnit { Documents, Images };
enum class StageResource { Cpu, Gpu, Bandwidth };

struct StageProfile {
    StageId id;
    double rate = 1.0;  // items per second (unit below)
    StageRateUnit rate_unit = StageRateUnit::Documents;
    double filter_ratio = 0.0;  // fraction REMOVED, in [0,1)
    StageResource resource = StageResource::Cpu;
};

struct StageProfiles {
    std::vector<StageProfile> stages;  // the four canonical stages
    double images_per_doc = 2.97;

    const StageProfile& of(StageId id) const;
};

// Default profiles for the model: measured average rates and removal ratios
// of the production pipeline. The image stage is bandwidth-bound and its
// rate is expressed in images per second.
StageProfiles default_stage_profiles();

StageProfiles load_stage_profiles(const toml::Table& config);

class PlanError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One node is a single stage or one parallel group of stages running on the
// same input; only the bandwidth-bound stage may share a group.
struct PlanNode {
    std::vector<StageId> stages;  // size 1 = sequential, >1 = parallel group
    bool is_group() const { return stages.size() > 1; }
};

struct PipelinePlan {
    std::vector<PlanNode> nodes;

    std::string notation() const;  // e.g. ①②(③④)
};

// Validates: each stage exactly once, preliminary before detailed, at most
// one group, groups only with the bandwidth stage inside. Throws PlanError
// naming the violated constraint.
void validate_plan(const PipelinePlan& plan, const StageProfiles& profiles);

struct PlanCost {
    std::vector<double> node_seconds;
    std::vector<double> survivors_after;  // docs remaining after each node
    double total_seconds = 0.0;
    double total_hours = 0.0;
};

// Sequential node: time = N / doc_rate(stage); survivors = N * (1 - ratio).
// Parallel group: time = max over members of N / doc_rate(member);
// survivors = N * prod(1 - ratio). doc_rate converts image-rate stages via
// images_per_doc.
PlanCost plan_time(const PipelinePlan& plan, const StageProfiles& profiles, double n_docs);

// The twelve valid plans, in canonical report order: for each ordering of
// {①,②,④} with ① before ④ (①②④, ②①④, ①④②), the image stage runs
// last sequentially, or grouped with the 3rd, 2nd, or 1st position.
std::vector<PipelinePlan> enumerate_plans(const StageProfiles& profiles);

// argmin of plan_time over enumerate_plans; ties break lexicographically by
// notation.
std::pair<PipelinePlan, PlanCost> optimal_plan(const StageProfiles& profiles, double n_docs);

// TSV of all plans (plan, hours), optimum marked.
std::string plan_table_tsv(const StageProfiles& profiles, double n_docs);

}  // namespace omni
