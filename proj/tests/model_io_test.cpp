/*
 * Copyright 2026 The AdaptFlow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <random>

#include "adaptflow/errors.hpp"
#include "adaptflow/model_io.hpp"
#include "adaptflow/tactics.hpp"
#include "support/model_generator.hpp"

namespace af = adaptflow;

namespace {

std::string fixture_path() { return std::string(ADAPTFLOW_FIXTURE_DIR) + "/emergency_call.json"; }

const char* kMinimal = R"({
  "workflow": {"kind": "service", "service": "s"},
  "services": [{"name": "s", "providers": [{"id": "p", "latency_mean_ms": 10}]}],
  "quality_requirements": [],
  "adaptation_plans": []
})";

std::string with_workflow(const std::string& workflow)
{
    return R"({"workflow": )" + workflow + R"(,
  "services": [{"name": "a", "providers": [{"id": "pa", "latency_mean_ms": 10}]},
               {"name": "b", "providers": [{"id": "pb", "latency_mean_ms": 20}]}],
  "quality_requirements": [], "adaptation_plans": []})";
}

} // namespace

TEST(ModelIo, FixtureParsesAndValidates)
{
    af::AdaptiveProcessModel m = af::load_model_file(fixture_path());
    EXPECT_EQ(m.workflow.kind, af::NodeKind::Seq);
    EXPECT_EQ(m.workflow.children.at(0).service, "identify_call_number");
    EXPECT_EQ(m.adaptation_plans.size(), 5u);
    EXPECT_EQ(m.adaptation_plans[0].trigger, "Automatic call number detection failed");
    ASSERT_TRUE(m.scenario.has_value());
    EXPECT_EQ(m.scenario->seed, 42u);
}

TEST(ModelIo, MinimalSingleServiceModel)
{
    af::AdaptiveProcessModel m = af::parse_model(kMinimal);
    EXPECT_EQ(m.workflow.kind, af::NodeKind::Service);
    EXPECT_TRUE(m.quality_requirements.empty());
    EXPECT_FALSE(m.scenario.has_value());
    EXPECT_EQ(af::parse_model(af::serialize_model(m)), m);
}

TEST(ModelIo, SelProbabilitiesMustSumToOne)
{
    std::string doc = with_workflow(R"({"kind": "sel", "label": "choice", "probabilities": [0.5, 0.6],
        "children": [{"kind": "service", "service": "a"}, {"kind": "service", "service": "b"}]})");
    try {
        af::parse_model(doc);
        FAIL() << "accepted";
    } catch (const af::ValidationError& e) {
        EXPECT_NE(e.element().find("choice"), std::string::npos) << e.element();
    }
}

TEST(ModelIo, SyntaxErrorCarriesPosition)
{
    try {
        af::parse_model("{\n  \"workflow\": [1,\n}");
        FAIL() << "accepted";
    } catch (const af::SyntaxError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_GE(e.column(), 1u);
    }
}

TEST(ModelIo, UnknownFieldRejected)
{
    std::string doc = with_workflow(R"({"kind": "service", "service": "a", "colour": "red"})");
    EXPECT_THROW(af::parse_model(doc), af::ValidationError);
}

TEST(ModelIo, AndParNeedsTwoBranches)
{
    std::string doc = with_workflow(R"({"kind": "and_par", "children": [{"kind": "service", "service": "a"}]})");
    EXPECT_THROW(af::parse_model(doc), af::ValidationError);
}

TEST(ModelIo, UnknownServiceRejected)
{
    try {
        af::parse_model(with_workflow(R"({"kind": "service", "service": "zzz"})"));
        FAIL();
    } catch (const af::ValidationError& e) {
        EXPECT_EQ(e.element(), "service 'zzz'");
    }
}

TEST(ModelIo, FixtureRoundTripIsAFixpoint)
{
    af::AdaptiveProcessModel m = af::load_model_file(fixture_path());
    std::string once = af::serialize_model(m);
    af::AdaptiveProcessModel back = af::parse_model(once);
    EXPECT_EQ(back, m);
    EXPECT_EQ(af::serialize_model(back), once);
    EXPECT_EQ(once.back(), '\n');
}

TEST(ModelIo, AllNodeKindsRoundTrip)
{
    std::string doc = with_workflow(R"({"kind": "seq", "label": "top", "children": [
        {"kind": "loop", "k": 3, "children": [{"kind": "service", "service": "a"}]},
        {"kind": "opt", "probabilities": [0.25], "children": [{"kind": "service", "service": "b"}]},
        {"kind": "opt", "children": [{"kind": "service", "service": "a"}]},
        {"kind": "and_par", "children": [{"kind": "service", "service": "a"},
            {"kind": "sel", "probabilities": [0.3, 0.7], "children": [
                {"kind": "service", "service": "a"}, {"kind": "service", "service": "b"}]}]}]})");
    af::AdaptiveProcessModel m = af::parse_model(doc);
    EXPECT_EQ(m.workflow.children[0].iterations, 3);
    EXPECT_TRUE(m.workflow.children[2].probabilities.empty());
    EXPECT_EQ(af::parse_model(af::serialize_model(m)), m);
}

TEST(ModelIo, GeneratedModelsRoundTrip)
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        oracle::GeneratorOptions opt;
        opt.max_depth = 5;
        af::AdaptiveProcessModel m = oracle::random_model(rng, opt);
        af::AdaptiveProcessModel back = af::parse_model(af::serialize_model(m));
        ASSERT_EQ(back, m) << af::serialize_model(m);
    }
}

TEST(ModelIo, ResolveLabel)
{
    af::AdaptiveProcessModel m = af::load_model_file(fixture_path());
    const af::ProcessNode& loc = af::resolve_label(m, "finding_geographical_location");
    EXPECT_EQ(loc.kind, af::NodeKind::Seq);
    EXPECT_EQ(loc.children.at(0).service, "find_by_id");
    EXPECT_EQ(&af::resolve_label(m, "root"), &m.workflow);
    EXPECT_THROW(af::resolve_label(m, "nonexistent"), af::NotFound);
}

TEST(ModelIo, MutationsNameTheElement)
{
    const af::AdaptiveProcessModel base = af::load_model_file(fixture_path());
    const auto& lib = af::TacticLibrary::builtin();
    auto element_of = [&](af::AdaptiveProcessModel m) -> std::string {
        try {
            af::validate_model(m, lib);
        } catch (const af::ValidationError& e) {
            return e.element();
        }
        return "";
    };
    {
        auto m = base;
        m.quality_requirements[0].target = "ghost";
        EXPECT_EQ(element_of(m), "label 'ghost'");
    }
    {
        auto m = base;
        m.adaptation_plans[2].trigger = "Never raised";
        EXPECT_NE(element_of(m).find("Never raised"), std::string::npos);
    }
    {
        auto m = base;
        m.services[1].providers[0].failure_probability = 1.5;
        EXPECT_EQ(element_of(m).rfind("provider '", 0), 0u);
    }
    {
        auto m = base;
        m.adaptation_plans[0].flow[0].alternatives[0][0].tactic.tactic = "teleport";
        EXPECT_NE(element_of(m).find("teleport"), std::string::npos);
    }
}

TEST(ModelIo, DeclaredAssumptionsCollected)
{
    af::AdaptiveProcessModel m = af::load_model_file(fixture_path());
    auto names = af::declared_assumptions(m);
    auto has = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    EXPECT_TRUE(has("human operator is available"));
    EXPECT_TRUE(has("Id is identified"));
    EXPECT_TRUE(has("map service is available"));
}
