#include <doctest.h>

#include <algorithm>
#include <random>

#include "omniengine/scheduler.hpp"

using namespace omni;

namespace {

// Reference times for the default profiles at one billion documents,
// hand-evaluated from the model's arithmetic (e.g. the all-sequential best
// plan: 1e9/1.09e6 + 2e8/3.88e5 + 2e7/1e5 + 6.6e6*2.97/3000 seconds).
const std::vector<std::pair<std::string, double>> kReferenceHours = {
    {"①②④③", 2.31},          // ①②④③
    {"①②(③④)", 5.95},        // ①②(③④)
    {"①(③②)④", 56.14},       // ①(③②)④
    {"(③①)②④", 278.37},      // (③①)②④
    {"②①④③", 2.65},          // ②①④③
    {"②①(③④)", 6.30},        // ②①(③④)
    {"②(③①)④", 28.66},       // ②(③①)④
    {"(③②)①④", 278.26},      // (③②)①④
    {"①④②③", 2.71},          // ①④②③
    {"①④(③②)", 19.33},       // ①④(③②)
    {"①(③④)②", 55.90},       // ①(③④)②
    {"(③①)④②", 279.59},      // (③①)④②
};

PipelinePlan plan_of(std::vector<PlanNode> nodes) { return PipelinePlan{std::move(nodes)}; }

}  // namespace

TEST_SUITE("scheduler") {

TEST_CASE("single sequential stage follows the formula") {
    StageProfiles profiles = default_stage_profiles();
    // N=1000 at 100 docs/s with no filtering: 10 s, all survive.
    profiles.stages[0].rate = 100;
    profiles.stages[0].filter_ratio = 0.0;
    PipelinePlan plan = plan_of({{{StageId::PreliminaryTextFilter}},
                                 {{StageId::Dedup}},
                                 {{StageId::ImageDownloadFilter}},
                                 {{StageId::DetailedTextFilter}}});
    PlanCost cost = plan_time(plan, profiles, 1000);
    CHECK(cost.node_seconds[0] == doctest::Approx(10.0));
    CHECK(cost.survivors_after[0] == doctest::Approx(1000.0));
}

// Hand evaluation of the best plan: 917.4 + 515.5 + 200 + 6.6e6*2.97/3000
// seconds, about 2.27 hours.
TEST_CASE("all-sequential best plan matches the hand evaluation") {
    StageProfiles profiles = default_stage_profiles();
    PipelinePlan plan = plan_of({{{StageId::PreliminaryTextFilter}},
                                 {{StageId::Dedup}},
                                 {{StageId::DetailedTextFilter}},
                                 {{StageId::ImageDownloadFilter}}});
    PlanCost cost = plan_time(plan, profiles, 1e9);
    double expected = 1e9 / 1090e3 + 2e8 / 388e3 + 2e7 / 100e3 + 6.6e6 * 2.97 / 3000.0;
    CHECK(cost.total_seconds == doctest::Approx(expected));
    CHECK(cost.total_hours == doctest::Approx(2.268).epsilon(0.01));
}

// 917.4 + 515.5 + max(2e7*2.97/3000, 2e7/1e5) seconds, about 5.90 hours.
TEST_CASE("parallel group costs the slowest member") {
    StageProfiles profiles = default_stage_profiles();
    PipelinePlan plan = plan_of({{{StageId::PreliminaryTextFilter}},
                                 {{StageId::Dedup}},
                                 {{StageId::ImageDownloadFilter, StageId::DetailedTextFilter}}});
    PlanCost cost = plan_time(plan, profiles, 1e9);
    double group = std::max(2e7 * 2.97 / 3000.0, 2e7 / 100e3);
    CHECK(cost.node_seconds[2] == doctest::Approx(group));
    CHECK(cost.total_hours == doctest::Approx(5.898).epsilon(0.01));
    // Survivors of a group come from the product of keep fractions.
    CHECK(cost.survivors_after[2] == doctest::Approx(2e7 * 0.6 * 0.33));
}

TEST_CASE("enumeration produces exactly the twelve canonical plans in order") {
    auto plans = enumerate_plans(default_stage_profiles());
    REQUIRE(plans.size() == 12);
    for (size_t i = 0; i < plans.size(); ++i) {
        CAPTURE(i);
        CHECK(plans[i].notation() == kReferenceHours[i].first);
    }
}

TEST_CASE("every enumerated plan keeps preliminary before detailed") {
    auto plans = enumerate_plans(default_stage_profiles());
    for (const auto& plan : plans) {
        int pos_prelim = -1, pos_detail = -1;
        for (size_t n = 0; n < plan.nodes.size(); ++n) {
            for (StageId id : plan.nodes[n].stages) {
                if (id == StageId::PreliminaryTextFilter) pos_prelim = static_cast<int>(n);
                if (id == StageId::DetailedTextFilter) pos_detail = static_cast<int>(n);
            }
        }
        CHECK(pos_prelim < pos_detail);
    }
}

TEST_CASE("invalid plans are rejected with the violated constraint") {
    StageProfiles profiles = default_stage_profiles();
    // Detailed before preliminary.
    CHECK_THROWS_WITH_AS(plan_time(plan_of({{{StageId::DetailedTextFilter}},
                                            {{StageId::PreliminaryTextFilter}},
                                            {{StageId::Dedup}},
                                            {{StageId::ImageDownloadFilter}}}),
                                   profiles, 1e6),
                         doctest::Contains("precede"), PlanError);
    // Duplicate stage.
    CHECK_THROWS_WITH_AS(plan_time(plan_of({{{StageId::Dedup}},
                                            {{StageId::Dedup}},
                                            {{StageId::PreliminaryTextFilter}},
                                            {{StageId::ImageDownloadFilter}},
                                            {{StageId::DetailedTextFilter}}}),
                                   profiles, 1e6),
                         doctest::Contains("exactly once"), PlanError);
    // Group without the bandwidth stage.
    CHECK_THROWS_WITH_AS(plan_time(plan_of({{{StageId::PreliminaryTextFilter, StageId::Dedup}},
                                            {{StageId::ImageDownloadFilter}},
                                            {{StageId::DetailedTextFilter}}}),
                                   profiles, 1e6),
                         doctest::Contains("bandwidth"), PlanError);
}

TEST_CASE("all twelve modeled hours match the reference table within 5 percent") {
    StageProfiles profiles = default_stage_profiles();
    auto plans = enumerate_plans(profiles);
    std::vector<double> modeled;
    for (size_t i = 0; i < plans.size(); ++i) {
        PlanCost cost = plan_time(plans[i], profiles, 1e9);
        modeled.push_back(cost.total_hours);
        CAPTURE(plans[i].notation());
        CHECK(std::abs(cost.total_hours - kReferenceHours[i].second) / kReferenceHours[i].second <=
              0.05);
    }

    // The induced ranking is identical.
    std::vector<size_t> rank_model(12), rank_reference(12);
    for (size_t i = 0; i < 12; ++i) rank_model[i] = rank_reference[i] = i;
    std::sort(rank_model.begin(), rank_model.end(),
              [&](size_t a, size_t b) { return modeled[a] < modeled[b]; });
    std::sort(rank_reference.begin(), rank_reference.end(), [&](size_t a, size_t b) {
        return kReferenceHours[a].second < kReferenceHours[b].second;
    });
    CHECK(rank_model == rank_reference);
}

TEST_CASE("optimal plan is the all-sequential image-last order") {
    auto [plan, cost] = optimal_plan(default_stage_profiles(), 1e9);
    CHECK(plan.notation() == "①②④③");  // ①②④③
    CHECK(cost.total_hours < 2.5);
}

// With an infinitely fast detailed filter, moving it earlier can only help:
// evaluate all twelve plans under the modified profile.
TEST_CASE("faster detailed filtering never punishes early placement") {
    StageProfiles profiles = default_stage_profiles();
    profiles.stages[3].rate = 1e18;
    auto plans = enumerate_plans(profiles);
    auto hours = [&](const char* notation) {
        for (const auto& plan : plans) {
            if (plan.notation() == notation) return plan_time(plan, profiles, 1e9).total_hours;
        }
        FAIL("no such plan");
        return 0.0;
    };
    // ①④②③ (detailed early) vs ①②④③ (detailed late): early is never worse.
    CHECK(hours("①④②③") <= hours("①②④③"));
    CHECK(hours("②①④③") >= hours("①④②③"));
}

TEST_CASE("property: raising a non-final stage's ratio never increases total time") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 200; ++trial) {
        StageProfiles profiles = default_stage_profiles();
        for (auto& stage : profiles.stages) {
            stage.rate = 1e3 + static_cast<double>(rng() % 1000000);
            stage.filter_ratio = static_cast<double>(rng() % 80) / 100.0;
        }
        auto plans = enumerate_plans(profiles);
        const PipelinePlan& plan = plans[rng() % plans.size()];

        // Pick a stage not in the final node.
        std::vector<StageId> early;
        for (size_t n = 0; n + 1 < plan.nodes.size(); ++n) {
            for (StageId id : plan.nodes[n].stages) early.push_back(id);
        }
        StageId chosen = early[rng() % early.size()];
        double before = plan_time(plan, profiles, 1e8).total_seconds;
        for (auto& stage : profiles.stages) {
            if (stage.id == chosen)
                stage.filter_ratio = std::min(0.99, stage.filter_ratio + 0.1);
        }
        double after = plan_time(plan, profiles, 1e8).total_seconds;
        CHECK(after <= before + 1e-9);
    }
}

TEST_CASE("property: final survivor count is order independent") {
    StageProfiles profiles = default_stage_profiles();
    auto plans = enumerate_plans(profiles);
    double expected = 1e9;
    for (const auto& stage : profiles.stages) expected *= 1.0 - stage.filter_ratio;
    for (const auto& plan : plans) {
        PlanCost cost = plan_time(plan, profiles, 1e9);
        CHECK(cost.survivors_after.back() == doctest::Approx(expected));
    }
}

TEST_CASE("profiles load from toml") {
    auto profiles = load_stage_profiles(toml::parse(R"(
images_per_doc = 2.97

[[stage]]
id = 1
rate = 1090000
unit = "documents"
ratio = 0.80
resource = "cpu"

[[stage]]
id = 2
rate = 388000
unit = "documents"
ratio = 0.90
resource = "cpu"

[[stage]]
id = 3
rate = 3000
unit = "images"
ratio = 0.40
resource = "bandwidth"

[[stage]]
id = 4
rate = 100000
unit = "documents"
ratio = 0.67
resource = "gpu"
)"));
    CHECK(profiles.images_per_doc == doctest::Approx(2.97));
    CHECK(profiles.of(StageId::ImageDownloadFilter).rate_unit == StageRateUnit::Images);
    auto [plan, cost] = optimal_plan(profiles, 1e9);
    CHECK(plan.notation() == "①②④③");

    CHECK_THROWS_AS(load_stage_profiles(toml::parse("images_per_doc = 1.0")), PlanError);
}

TEST_CASE("tsv table lists twelve rows and marks the optimum") {
    std::string tsv = plan_table_tsv(default_stage_profiles(), 1e9);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 14);  // header + 12 + optimal line
    CHECK(tsv.find("optimal\t①②④③") != std::string::npos);
}

}  // TEST_SUITE
