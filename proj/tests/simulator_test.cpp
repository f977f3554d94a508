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

#include <sstream>

#include "adaptflow/errors.hpp"
#include "adaptflow/model_io.hpp"
#include "adaptflow/qos.hpp"
#include "adaptflow/runtime.hpp"
#include "adaptflow/simulator.hpp"
#include "adaptflow/tactics.hpp"
#include "adaptflow/trace.hpp"

namespace af = adaptflow;
using CA = af::ChangeAction;

namespace {

af::ProviderProfile provider(const std::string& id, double mean, double fail = 0.0, double payload = 0.0)
{
    return {id, mean, 0.0, fail, 1.0, payload};
}

af::ProcessNode svc(const std::string& s)
{
    af::ProcessNode n;
    n.service = s;
    return n;
}

// Two services in sequence (or and_par) with fixed latencies.
af::AdaptiveProcessModel pair_model(af::ProviderProfile a, af::ProviderProfile b, af::NodeKind kind = af::NodeKind::Seq)
{
    af::AdaptiveProcessModel m;
    m.workflow.kind = kind;
    m.workflow.children = {svc("a"), svc("b")};
    m.services = {{"a", {std::move(a)}}, {"b", {std::move(b)}}};
    return m;
}

af::ScenarioEvent bandwidth_at(std::int64_t t, double v) { return {t, af::ScenarioAction::SetBandwidth, "", v}; }

af::ConcreteTactic instantiate(af::RuntimeModel& rt, const std::string& kind, std::vector<std::string> args,
                               std::map<std::string, double> params = {})
{
    af::ContextModel ctx = af::context_from_runtime(rt);
    af::TacticEnv env{&rt.catalog, &rt.next_fresh, std::move(params), {}};
    return af::instantiate(af::TacticLibrary::builtin().at(kind), args, ctx, env);
}

// Runs a single instance launched at `launch` to completion; returns its elapsed time or -1 if it failed.
std::int64_t single_run(const af::RuntimeModel& rt, af::ScenarioScript sc, std::int64_t launch = 0,
                        af::TraceWriter* tw = nullptr)
{
    af::Simulator sim(rt, sc, {true});
    sim.set_trace(tw);
    sim.run_until(launch);
    sim.launch_instance();
    sim.drain();
    const auto& r = sim.records().at(0);
    return r.completed ? r.end_ms - r.start_ms : -1;
}

af::AdaptiveProcessModel fixture() { return af::load_model_file(std::string(ADAPTFLOW_FIXTURE_DIR) + "/emergency_call.json"); }

} // namespace

TEST(Simulator, SameSeedSameState)
{
    auto m = fixture();
    af::RuntimeModel rt = af::transform(m);
    std::ostringstream t1, t2;
    af::TraceWriter w1(&t1, false), w2(&t2, false);
    af::Simulator a(rt, *m.scenario), b(rt, *m.scenario);
    a.set_trace(&w1);
    b.set_trace(&w2);
    a.run_until(60000);
    b.run_until(60000);
    EXPECT_EQ(a.state_hash(), b.state_hash());
    EXPECT_EQ(t1.str(), t2.str());
    EXPECT_GT(a.launched(), 0u);
}

TEST(Simulator, EmptyScenarioIdles)
{
    af::RuntimeModel rt = af::transform(fixture());
    af::ScenarioScript sc;
    sc.horizon_ms = 10000;
    af::Simulator sim(rt, sc);
    sim.run_until(10000);
    EXPECT_EQ(sim.launched(), 0u);
    EXPECT_EQ(sim.now(), 10000);
}

TEST(Simulator, LaunchRate)
{
    af::RuntimeModel rt = af::transform(fixture());
    af::ScenarioScript sc;
    sc.horizon_ms = 10000;
    sc.events = {{0, af::ScenarioAction::StartInstances, "", 1.0}};
    af::Simulator sim(rt, sc);
    sim.run_until(20000);
    EXPECT_EQ(sim.launched(), 10u);
}

TEST(Simulator, ConservationAfterDrain)
{
    auto m = fixture();
    af::RuntimeModel rt = af::transform(m);
    af::Simulator sim(rt, *m.scenario);
    sim.run_until(m.scenario->horizon_ms);
    sim.drain();
    EXPECT_GT(sim.failed(), 0u);
    EXPECT_EQ(sim.launched(), sim.completed() + sim.failed());
    EXPECT_EQ(sim.in_flight(), 0u);
}

TEST(Simulator, AndParJoinWaitsForAll)
{
    af::RuntimeModel rt = af::transform(pair_model(provider("pa", 100), provider("pb", 130), af::NodeKind::AndPar));
    EXPECT_EQ(single_run(rt, {}), 130);
}

TEST(Simulator, SequenceAddsLatencies)
{
    af::RuntimeModel rt = af::transform(pair_model(provider("pa", 100), provider("pb", 130)));
    EXPECT_EQ(single_run(rt, {}), 230);
}

TEST(Simulator, FirstResponseJoin)
{
    af::AdaptiveProcessModel m;
    m.workflow = svc("s");
    m.services = {{"s", {provider("p1", 110), provider("p2", 125)}}};
    af::RuntimeModel rt = af::transform(m);
    auto ct = instantiate(rt, "parallel", {"root.SC:s", "standby.SC:s@p2"});
    af::apply_to_runtime(rt, ct.batch);
    af::TraceWriter tw;
    EXPECT_EQ(single_run(rt, {}, 0, &tw), 110);
    EXPECT_EQ(tw.count("invoke"), 2u);
    EXPECT_EQ(tw.count("complete"), 1u);

    // Primary fails: the peer's answer is used.
    m.services[0].providers[0].failure_probability = 1.0;
    rt = af::transform(m);
    ct = instantiate(rt, "parallel", {"root.SC:s", "standby.SC:s@p2"});
    af::apply_to_runtime(rt, ct.batch);
    EXPECT_EQ(single_run(rt, {}), 125);
}

TEST(Simulator, SerialFallsBackOnFailure)
{
    af::AdaptiveProcessModel m;
    m.workflow = svc("s");
    m.services = {{"s", {provider("p1", 100, 1.0), provider("p2", 120)}}};
    af::RuntimeModel rt = af::transform(m);
    auto ct = instantiate(rt, "serial", {"root.SC:s", "standby.SC:s@p2"});
    af::apply_to_runtime(rt, ct.batch);
    EXPECT_EQ(single_run(rt, {}), 220);
    m.services[0].providers[0].failure_probability = 0.0;
    rt = af::transform(m);
    ct = instantiate(rt, "serial", {"root.SC:s", "standby.SC:s@p2"});
    af::apply_to_runtime(rt, ct.batch);
    af::TraceWriter tw;
    EXPECT_EQ(single_run(rt, {}, 0, &tw), 100);
    EXPECT_EQ(tw.count("invoke"), 1u);
}

TEST(Simulator, ConditionRetriesUpToCap)
{
    af::AdaptiveProcessModel m;
    m.workflow = svc("s");
    m.services = {{"s", {provider("p", 10, 1.0)}}};
    af::RuntimeModel rt = af::transform(m);
    auto ct = instantiate(rt, "reexecute", {"root.SC:s"});
    af::apply_to_runtime(rt, ct.batch);
    af::TraceWriter tw;
    EXPECT_EQ(single_run(rt, {}, 0, &tw), -1);
    EXPECT_EQ(tw.count("invoke"), 5u);
}

TEST(Simulator, CacheHitSkipsService)
{
    af::RuntimeModel rt = af::transform(pair_model(provider("pa", 100), provider("pb", 30)));
    auto ct = instantiate(rt, "cache", {"root.0.SC:a"}, {{"hit_ratio", 1.0}});
    af::apply_to_runtime(rt, ct.batch);
    af::TraceWriter tw;
    EXPECT_EQ(single_run(rt, {}, 0, &tw), 30);
    EXPECT_EQ(tw.count("invoke"), 1u);
}

TEST(Simulator, CompressorTimeline)
{
    af::RuntimeModel rt = af::transform(pair_model(provider("pa", 0, 0, 1000), provider("pb", 0)));
    af::ScenarioScript sc;
    sc.events = {bandwidth_at(0, 1.0)};
    EXPECT_EQ(single_run(rt, sc), 1000);

    auto ct = instantiate(rt, "compress", {"root.0.SC:a", "root.1.SC:b"});
    af::apply_to_runtime(rt, ct.batch);
    af::Simulator sim(rt, sc, {true});
    sim.run_until(0);
    sim.launch_instance();
    sim.drain();
    ASSERT_TRUE(sim.records().at(0).completed);
    EXPECT_EQ(sim.records()[0].end_ms, 310);
    EXPECT_DOUBLE_EQ(sim.battery(), 2.0);
}

TEST(Simulator, LinkDownLosesMessage)
{
    af::RuntimeModel rt = af::transform(pair_model(provider("pa", 150, 0, 10), provider("pb", 0)));
    af::ScenarioScript sc;
    sc.events = {bandwidth_at(100, 0.0), bandwidth_at(200, 1.0)};
    EXPECT_EQ(single_run(rt, sc), -1);
}

TEST(Simulator, QueueHoldsUntilLinkRestored)
{
    af::RuntimeModel rt = af::transform(pair_model(provider("pa", 150, 0, 10), provider("pb", 0)));
    auto ct = instantiate(rt, "add_queue", {"root.0.SC:a"});
    af::apply_to_runtime(rt, ct.batch);
    af::ScenarioScript sc;
    sc.events = {bandwidth_at(100, 0.0), bandwidth_at(200, 1.0)};
    af::Simulator sim(rt, sc, {true});
    sim.launch_instance();
    sim.drain();
    ASSERT_TRUE(sim.records().at(0).completed);
    EXPECT_EQ(sim.records()[0].end_ms, 210);
    EXPECT_GT(sim.memory(), 0.0);
}

TEST(Simulator, RemovingQueueReroutesHeldMessages)
{
    af::RuntimeModel rt = af::transform(pair_model(provider("pa", 150), provider("pb", 0)));
    auto ct = instantiate(rt, "add_queue", {"root.0.SC:a"});
    af::apply_to_runtime(rt, ct.batch);
    const std::string q = ct.batch[0].id;
    af::ScenarioScript sc;
    sc.events = {bandwidth_at(100, 0.0)};

    af::TraceWriter tw;
    af::Simulator sim(rt, sc, {true});
    sim.set_trace(&tw);
    sim.launch_instance();
    sim.run_until(170);
    EXPECT_EQ(sim.in_flight(), 1u);
    std::vector<CA> undo{CA::remove_binding("root.0.SC:a", q), CA::remove_binding(q, "root.SeqIn.1"),
                         CA::remove_connector(q), CA::add_binding("root.0.SC:a", "root.SeqIn.1")};
    sim.configure(undo);
    sim.drain();
    ASSERT_TRUE(sim.records().at(0).completed);
    EXPECT_EQ(sim.records()[0].end_ms, 170);
    EXPECT_GE(tw.count("reconfigure"), 1u);

    // Same, but the queue's successor disappears as well: the instance fails.
    af::Simulator sim2(rt, sc, {true});
    sim2.launch_instance();
    sim2.run_until(170);
    std::vector<CA> drop{CA::remove_binding("root.0.SC:a", q),         CA::remove_binding(q, "root.SeqIn.1"),
                         CA::remove_binding("root.SeqIn.1", "root.SeqOut.1"), CA::remove_connector(q),
                         CA::remove_connector("root.SeqIn.1"),         CA::add_binding("root.0.SC:a", "root.SeqOut.1")};
    sim2.configure(drop);
    sim2.drain();
    EXPECT_FALSE(sim2.records().at(0).completed);
}

TEST(Simulator, ConfigureParallelFansOut)
{
    auto m = fixture();
    af::RuntimeModel rt = af::transform(m);
    af::ScenarioScript sc;
    af::Simulator sim(rt, sc);
    auto ct = instantiate(rt, "parallel", {"root.6.0.1.SC:map", "standby.SC:map@google_map"});
    sim.configure(ct.batch);
    af::apply_to_runtime(rt, ct.batch);
    EXPECT_TRUE(af::verify_causal_connection(rt, sim).empty());
    af::TraceWriter tw;
    sim.set_trace(&tw);
    sim.launch_instance();
    sim.drain();
    int municipal = 0, google = 0;
    for (const auto& e : tw.events())
        if (e["kind"] == "invoke") {
            municipal += e["provider"] == "municipality_map";
            google += e["provider"] == "google_map";
        }
    EXPECT_EQ(municipal, 3);
    EXPECT_EQ(google, 3);
}

TEST(Simulator, ConfigureIsAtomic)
{
    af::RuntimeModel rt = af::transform(fixture());
    af::Simulator sim(rt, {});
    auto h = sim.state_hash();
    sim.configure({});
    EXPECT_EQ(sim.state_hash(), h);
    std::vector<CA> bad{CA::add_connector("x", af::ConnectorType::Simple), CA::add_binding("x", "missing")};
    EXPECT_THROW(sim.configure(bad), af::DanglingReference);
    EXPECT_EQ(sim.state_hash(), h);
    EXPECT_EQ(sim.find_node("x"), nullptr);
}

TEST(Simulator, InterceptorInstallAndUninstall)
{
    af::RuntimeModel rt = af::transform(pair_model(provider("pa", 100), provider("pb", 50)));
    af::Simulator sim(rt, {});
    EXPECT_THROW(sim.install_interceptor({"i", "nowhere", {af::InterceptorEventKind::BlockEntry}}), af::NotFound);
    EXPECT_THROW(sim.uninstall_interceptor("nope"), af::NotFound);
    sim.install_interceptor({"t.in", "root.BlockStart", {af::InterceptorEventKind::BlockEntry}});
    sim.install_interceptor({"t.out", "root.BlockEnd", {af::InterceptorEventKind::BlockExit}});
    sim.launch_instance();
    sim.run_until(10);
    auto evs = sim.take_interceptor_events();
    ASSERT_EQ(evs.size(), 1u);
    EXPECT_EQ(evs[0].kind, af::InterceptorEventKind::BlockEntry);

    // Removing the exit probe mid-run leaves the entry unmatched.
    sim.uninstall_interceptor("t.out");
    sim.drain();
    EXPECT_TRUE(sim.take_interceptor_events().empty());
    af::Checkpoint cp({"t.cp", "t", af::PropertyKind::Time, "root", {"t.in", "t.out"}, {}}, {"t", af::PropertyKind::Time});
    cp.ingest(evs[0]);
    cp.drop_pending();
    EXPECT_EQ(cp.orphan_events(), 1u);
}

TEST(Simulator, InterceptorsDoNotChangeTimeline)
{
    auto m = fixture();
    af::RuntimeModel with = af::transform(m);
    af::RuntimeModel without = with;
    for (auto& c : without.connectors)
        c.interceptors.clear();
    auto timeline = [&](const af::RuntimeModel& rt) {
        af::TraceWriter tw;
        tw.set_kind_filter({"invoke", "complete", "fail"});
        af::Simulator sim(rt, *m.scenario);
        sim.set_trace(&tw);
        sim.run_until(m.scenario->horizon_ms);
        sim.drain();
        std::string s;
        for (const auto& e : tw.events())
            s += e.dump() + "\n";
        return s;
    };
    EXPECT_EQ(timeline(with), timeline(without));
}

TEST(Simulator, ProviderFailureInjection)
{
    auto m = fixture();
    af::RuntimeModel rt = af::transform(m);
    af::Simulator sim(rt, *m.scenario);
    sim.run_until(29999);
    EXPECT_EQ(sim.failed(), 0u);
    EXPECT_EQ(sim.provider("auto_detection")->failure_probability, 0.0);
    sim.run_until(40000);
    EXPECT_EQ(sim.provider("auto_detection")->failure_probability, 1.0);
    EXPECT_GT(sim.failed(), 0u);
}

TEST(Rng, PortableTransforms)
{
    af::Rng a(1), b(1);
    for (int i = 0; i < 100; ++i) {
        double u = a.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_EQ(u, b.uniform());
    }
    af::Rng c(5), d(5);
    EXPECT_EQ(c.normal(10, 0), 10);
    EXPECT_EQ(c.uniform(), d.uniform());
    EXPECT_FALSE(c.bernoulli(0.0));
}
