#include "omniengine/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace omni {

std::string_view stage_symbol(StageId id) {
    switch (id) {
        case StageId::PreliminaryTextFilter: return "\xe2\x91\xa0";  // ①
        case StageId::Dedup: return "\xe2\x91\xa1";                  // ②
        case StageId::ImageDownloadFilter: return "\xe2\x91\xa2";    // ③
        case StageId::DetailedTextFilter: return "\xe2\x91\xa3";     // ④
    }
    return "?";
}

const StageProfile& StageProfiles::of(StageId id) const {
    for (const StageProfile& stage : stages) {
        if (stage.id == id) return stage;
    }
    throw PlanError("no profile for stage " + std::string(stage_symbol(id)));
}

StageProfiles default_stage_profiles() {
    StageProfiles profiles;
    profiles.stages = {
        {StageId::PreliminaryTextFilter, 1090e3, StageRateUnit::Documents, 0.80, StageResource::Cpu},
        {StageId::Dedup, 388e3, StageRateUnit::Documents, 0.90, StageResource::Cpu},
        {StageId::ImageDownloadFilter, 3e3, StageRateUnit::Images, 0.40, StageResource::Bandwidth},
        {StageId::DetailedTextFilter, 100e3, StageRateUnit::Documents, 0.67, StageResource::Gpu},
    };
    profiles.images_per_doc = 2.97;
    return profiles;
}

StageProfiles load_stage_profiles(const toml::Table& config) {
    StageProfiles profiles;
    profiles.images_per_doc = toml::get_float(config, "images_per_doc", 2.97);
    const toml::Value* stages = toml::find(config, "stage");
    if (!stages || !stages->is_array()) throw PlanError("profiles need [[stage]] entries");
    for (const toml::Value& entry : stages->as_array()) {
        const toml::Table& table = entry.as_table();
        StageProfile stage;
        int64_t id = toml::get_int(table, "id", 0);
        if (id < 1 || id > 4) throw PlanError("stage id must be 1..4");
        stage.id = static_cast<StageId>(id);
        stage.rate = toml::get_float(table, "rate", 0.0);
        if (stage.rate <= 0) throw PlanError("stage rate must be positive");
        std::string unit = toml::get_string(table, "unit", "documents");
        if (unit == "documents") stage.rate_unit = StageRateUnit::Documents;
        else if (unit == "images") stage.rate_unit = StageRateUnit::Images;
        else throw PlanError("stage unit must be documents|images");
        stage.filter_ratio = toml::get_float(table, "ratio", 0.0);
        if (stage.filter_ratio < 0.0 || stage.filter_ratio >= 1.0)
            throw PlanError("filter ratio must be in [0,1)");
        std::string resource = toml::get_string(table, "resource", "cpu");
        if (resource == "cpu") stage.resource = StageResource::Cpu;
        else if (resource == "gpu") stage.resource = StageResource::Gpu;
        else if (resource == "bandwidth") stage.resource = StageResource::Bandwidth;
        else throw PlanError("stage resource must be cpu|gpu|bandwidth");
        profiles.stages.push_back(stage);
    }
    if (profiles.stages.size() != 4) throw PlanError("expected exactly four stages");
    return profiles;
}

std::string PipelinePlan::notation() const {
    std::string out;
    for (const PlanNode& node : nodes) {
        if (node.is_group()) {
            out += "(";
            for (StageId id : node.stages) out += stage_symbol(id);
            out += ")";
        } else {
            out += stage_symbol(node.stages.front());
        }
    }
    return out;
}

void validate_plan(const PipelinePlan& plan, const StageProfiles& profiles) {
    int seen[5] = {0, 0, 0, 0, 0};
    int groups = 0;
    int node_of_stage[5] = {-1, -1, -1, -1, -1};
    for (size_t n = 0; n < plan.nodes.size(); ++n) {
        const PlanNode& node = plan.nodes[n];
        if (node.stages.empty()) throw PlanError("empty plan node");
        if (node.is_group()) {
            ++groups;
            bool has_bandwidth_stage = false;
            for (StageId id : node.stages) {
                if (profiles.of(id).resource == StageResource::Bandwidth) has_bandwidth_stage = true;
            }
            if (!has_bandwidth_stage)
                throw PlanError("parallel group without the bandwidth-bound stage");
            if (node.stages.size() > 2) {
                // Only the bandwidth stage may accompany others: a group of 3+
                // would pair two non-bandwidth stages with each other.
                int non_bandwidth = 0;
                for (StageId id : node.stages) {
                    if (profiles.of(id).resource != StageResource::Bandwidth) ++non_bandwidth;
                }
                if (non_bandwidth > 1)
                    throw PlanError("group pairs two non-bandwidth stages");
            }
        }
        for (StageId id : node.stages) {
            ++seen[static_cast<int>(id)];
            node_of_stage[static_cast<int>(id)] = static_cast<int>(n);
        }
    }
    for (int s = 1; s <= 4; ++s) {
        if (seen[s] != 1)
            throw PlanError("stage " + std::string(stage_symbol(static_cast<StageId>(s))) +
                            " must appear exactly once");
    }
    if (groups > 1) throw PlanError("at most one parallel group");
    if (node_of_stage[1] >= node_of_stage[4])
        throw PlanError("preliminary text filtering must precede detailed text filtering");
}

namespace {

double doc_rate(const StageProfile& stage, double images_per_doc) {
    return stage.rate_unit == StageRateUnit::Documents ? stage.rate
                                                       : stage.rate / images_per_doc;
}

}  // namespace

PlanCost plan_time(const PipelinePlan& plan, const StageProfiles& profiles, double n_docs) {
    validate_plan(plan, profiles);
    PlanCost cost;
    double remaining = n_docs;
    for (const PlanNode& node : plan.nodes) {
        double seconds = 0.0;
        double keep = 1.0;
        for (StageId id : node.stages) {
            const StageProfile& stage = profiles.of(id);
            seconds = std::max(seconds, remaining / doc_rate(stage, profiles.images_per_doc));
            keep *= 1.0 - stage.filter_ratio;
        }
        remaining *= keep;
        cost.node_seconds.push_back(seconds);
        cost.survivors_after.push_back(remaining);
        cost.total_seconds += seconds;
    }
    cost.total_hours = cost.total_seconds / 3600.0;
    return cost;
}

std::vector<PipelinePlan> enumerate_plans(const StageProfiles& profiles) {
    const StageId P = StageId::PreliminaryTextFilter;
    const StageId D = StageId::Dedup;
    const StageId I = StageId::ImageDownloadFilter;
    const StageId T = StageId::DetailedTextFilter;

    // Orderings of {①,②,④} with ① before ④, in canonical report order.
    const std::vector<std::vector<StageId>> bases = {{P, D, T}, {D, P, T}, {P, T, D}};

    std::vector<PipelinePlan> plans;
    for (const auto& base : bases) {
        // ③ sequential at the end, then grouped with position 2, 1, 0.
        PipelinePlan sequential;
        for (StageId id : base) sequential.nodes.push_back({{id}});
        sequential.nodes.push_back({{I}});
        plans.push_back(sequential);

        for (int position = 2; position >= 0; --position) {
            PipelinePlan plan;
            for (int i = 0; i < 3; ++i) {
                if (i == position) {
                    plan.nodes.push_back({{I, base[static_cast<size_t>(i)]}});
                } else {
                    plan.nodes.push_back({{base[static_cast<size_t>(i)]}});
                }
            }
            plans.push_back(plan);
        }
    }
    for (const PipelinePlan& plan : plans) validate_plan(plan, profiles);
    return plans;
}

std::pair<PipelinePlan, PlanCost> optimal_plan(const StageProfiles& profiles, double n_docs) {
    auto plans = enumerate_plans(profiles);
    size_t best = 0;
    PlanCost best_cost = plan_time(plans[0], profiles, n_docs);
    for (size_t i = 1; i < plans.size(); ++i) {
        PlanCost cost = plan_time(plans[i], profiles, n_docs);
        if (cost.total_seconds < best_cost.total_seconds ||
            (cost.total_seconds == best_cost.total_seconds &&
             plans[i].notation() < plans[best].notation())) {
            best = i;
            best_cost = cost;
        }
    }
    return {plans[best], best_cost};
}

std::string plan_table_tsv(const StageProfiles& profiles, double n_docs) {
    auto plans = enumerate_plans(profiles);
    auto [best, best_cost] = optimal_plan(profiles, n_docs);
    std::ostringstream out;
    out << "plan\thours\n";
    out.setf(std::ios::fixed);
    out.precision(2);
    for (const PipelinePlan& plan : plans) {
        PlanCost cost = plan_time(plan, profiles, n_docs);
        out << plan.notation() << '\t' << cost.total_hours;
        if (plan.notation() == best.notation()) out << "\t*";
        out << '\n';
    }
    out << "optimal\t" << best.notation() << '\n';
    return out.str();
}

}  // namespace omni
