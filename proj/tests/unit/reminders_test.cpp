#include <gtest/gtest.h>

#include <cmath>

#include "commsense/error.hpp"
#include "commsense/reminders.hpp"
#include "commsense/session.hpp"
#include "fixtures.hpp"

using namespace commsense;
using namespace commsense::testing;

namespace {

// One topic ("room") with the given label counts.
std::shared_ptr<const Workspace> single_topic(std::size_t pos, std::size_t neu, std::size_t neg) {
    return synthetic_workspace(labelled_block("room", pos, neu, neg), {{"Room", {"room"}}});
}

std::vector<std::size_t> indices_with(const Workspace& ws, SentimentLabel label) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ws.corpus().size(); ++i) {
        if (ws.corpus().sentiment(i) == label) out.push_back(i);
    }
    return out;
}

} // namespace

TEST(CoverageTrigger, RequiredCountsAtStandardThresholds) {
    // Room 40, Service 60, Location 70 comments at 50..90 %.
    const std::size_t sizes[] = {40, 60, 70};
    const double thresholds[] = {0.5, 0.6, 0.7, 0.8, 0.9};
    const std::size_t expected[3][5] = {{20, 24, 28, 32, 36}, {30, 36, 42, 48, 54}, {35, 42, 49, 56, 63}};
    for (int t = 0; t < 3; ++t) {
        for (int k = 0; k < 5; ++k) {
            EXPECT_EQ(coverage_required(thresholds[k], sizes[t]), expected[t][k]) << sizes[t] << " " << thresholds[k];
        }
    }
}

TEST(CoverageTrigger, RequiredIsCeilingForNonIntegralProducts) {
    EXPECT_EQ(coverage_required(0.7, 41), 29u);  // 28.7
    EXPECT_EQ(coverage_required(0.7, 1), 1u);
    EXPECT_EQ(coverage_required(1.0, 3), 3u);
}

TEST(CoverageTrigger, FiresExactlyOnceAtThreshold) {
    auto ws = single_topic(20, 0, 20);
    Session s("s", ws, TriggerConfig{}, StepClock{1000, 1});
    std::size_t fired_at = 0, fires = 0;
    for (std::size_t i = 0; i < ws->corpus().size(); ++i) {
        auto out = s.record_view(ws->corpus()[i].id);
        for (const auto& t : out.triggers) {
            ASSERT_EQ(t.kind, TriggerKind::coverage);
            ++fires;
            fired_at = i + 1;
            ASSERT_TRUE(t.coverage);
            EXPECT_EQ(t.coverage->viewed, 28u);
            EXPECT_EQ(t.coverage->total, 40u);
        }
    }
    EXPECT_EQ(fires, 1u);
    EXPECT_EQ(fired_at, 28u);
}

TEST(CoverageTrigger, NeverFiresBelowThreshold) {
    auto ws = single_topic(20, 0, 20);
    Session s("s", ws, TriggerConfig{}, StepClock{0, 1});
    for (std::size_t i = 0; i < 27; ++i) EXPECT_TRUE(s.record_view(ws->corpus()[i].id).triggers.empty());
}

TEST(BalanceTrigger, AllNegativeMarksAgainstCorpusMix) {
    auto ws = single_topic(5, 3, 4);
    SessionState st;
    const auto neg = indices_with(*ws, SentimentLabel::negative);
    for (int i = 0; i < 3; ++i) st.useful[neg[i]] = i + 1;
    const auto global = SentimentDistribution::from_counts(4617, 2247, 3136);
    const auto d = deviation(st, *ws, "t1", global);
    ASSERT_TRUE(d.evaluated);
    EXPECT_EQ(d.n_useful, 3u);
    EXPECT_NEAR(d.delta_p, 0.6864, 1e-9);
    EXPECT_NEAR(d.local_neg, 1.0, 0.0);
    EXPECT_NEAR(d.global_pos, 0.4617, 1e-12);

    TriggerConfig cfg;
    auto fired = evaluate_balance_trigger(st, *ws, "t1", cfg, 3, global);
    ASSERT_TRUE(fired);
    EXPECT_EQ(fired->kind, TriggerKind::balance);
    EXPECT_EQ(st.arm("t1"), ArmState::fired);
}

TEST(BalanceTrigger, MatchingMixGivesZeroDeviation) {
    auto ws = single_topic(4, 2, 4);  // corpus mix .4/.2/.4
    SessionState st;
    const auto pos = indices_with(*ws, SentimentLabel::positive);
    const auto neu = indices_with(*ws, SentimentLabel::neutral);
    const auto neg = indices_with(*ws, SentimentLabel::negative);
    // 2 positive, 1 neutral, 2 negative marked: same fractions.
    for (auto i : {pos[0], pos[1], neu[0], neg[0], neg[1]}) st.useful[i] = 1;
    const auto d = deviation(st, *ws, "t1");
    EXPECT_TRUE(d.evaluated);
    EXPECT_EQ(d.delta_p, 0.0);
    EXPECT_FALSE(evaluate_balance_trigger(st, *ws, "t1", TriggerConfig{}, 1));
}

TEST(BalanceTrigger, NoUsefulMarksIsNotEvaluated) {
    auto ws = single_topic(3, 0, 3);
    SessionState st;
    const auto d = deviation(st, *ws, "t1");
    EXPECT_FALSE(d.evaluated);
    EXPECT_EQ(d.delta_p, 0.0);
    EXPECT_FALSE(evaluate_balance_trigger(st, *ws, "t1", TriggerConfig{}, 1));
    EXPECT_EQ(st.balance_arm.count("t1"), 0u);
}

TEST(BalanceTrigger, DeviationEqualToThresholdDoesNotFire) {
    auto ws = single_topic(2, 0, 2);
    SessionState st;
    const auto pos = indices_with(*ws, SentimentLabel::positive);
    const auto neg = indices_with(*ws, SentimentLabel::negative);
    st.useful[pos[0]] = 1;
    st.useful[neg[0]] = 2;
    // local .5/.5 against .5/.3: delta is 0.5 - 0.3, the same double as 0.2.
    const auto global = SentimentDistribution{10, 5, 2, 3, 0.5, 0.2, 0.3};
    const auto d = deviation(st, *ws, "t1", global);
    ASSERT_EQ(d.delta_p, 0.2);
    TriggerConfig cfg;
    cfg.delta_theta = 0.2;
    EXPECT_FALSE(evaluate_balance_trigger(st, *ws, "t1", cfg, 1, global));
}

TEST(BalanceTrigger, NeutralMarksOnlyDiluteDenominators) {
    auto ws = single_topic(2, 2, 2);
    SessionState st;
    for (auto i : indices_with(*ws, SentimentLabel::neutral)) st.useful[i] = 1;
    const auto d = deviation(st, *ws, "t1");
    EXPECT_EQ(d.n_useful, 2u);
    EXPECT_EQ(d.n_neu, 2u);
    EXPECT_EQ(d.local_pos, 0.0);
    EXPECT_EQ(d.local_neg, 0.0);
    EXPECT_NEAR(d.delta_p, 1.0 / 3.0, 1e-15);
}

TEST(BalanceTrigger, UnknownTopicThrows) {
    auto ws = single_topic(1, 0, 1);
    SessionState st;
    EXPECT_THROW(deviation(st, *ws, "t9"), NotFound);
}

namespace {

// Drives the trigger through a sequence of deviations by swapping the
// global distribution: one negative useful comment, corpus p_neg = 1 - delta.
std::size_t fires_for(const std::vector<double>& deltas, TriggerConfig cfg) {
    auto ws = single_topic(0, 0, 1);
    SessionState st;
    st.useful[0] = 1;
    std::size_t fires = 0;
    std::uint64_t seq = 0;
    for (double delta : deltas) {
        const auto g = SentimentDistribution{1, 0, 0, 1, 0.0, delta, 1.0 - delta};
        fires += evaluate_balance_trigger(st, *ws, "t1", cfg, ++seq, g).has_value();
    }
    return fires;
}

} // namespace

TEST(BalanceRearm, ThetaRelativeRuleIsNotMonotone) {
    TriggerConfig cfg;
    cfg.rearm_policy = RearmPolicy::on_drop_below_theta;
    const std::vector<double> deltas{0.5, 0.22, 0.5};
    cfg.delta_theta = 0.20;
    EXPECT_EQ(fires_for(deltas, cfg), 1u);
    cfg.delta_theta = 0.25;
    EXPECT_EQ(fires_for(deltas, cfg), 2u);
}

TEST(BalanceRearm, FixedLevelRuleIsMonotoneOnTheCounterexample) {
    TriggerConfig cfg;
    const std::vector<double> deltas{0.5, 0.22, 0.5, 0.05, 0.5};
    std::size_t prev = SIZE_MAX;
    for (double theta : {0.10, 0.15, 0.20, 0.25, 0.30}) {
        cfg.delta_theta = theta;
        const auto n = fires_for(deltas, cfg);
        EXPECT_LE(n, prev) << theta;
        prev = n;
    }
    cfg.delta_theta = 0.2;
    EXPECT_EQ(fires_for(deltas, cfg), 2u);  // re-armed only by the 0.05 dip
}

TEST(BalanceRearm, LevelIsCappedByTheta) {
    TriggerConfig cfg;
    cfg.delta_theta = 0.05;
    cfg.rearm_level = 0.10;
    EXPECT_EQ(cfg.rearm_at(), 0.05);
    cfg.rearm_policy = RearmPolicy::on_drop_below_theta;
    cfg.delta_theta = 0.3;
    EXPECT_EQ(cfg.rearm_at(), 0.3);
}

TEST(TriggerConfigTest, ValidatesRanges) {
    TriggerConfig c;
    EXPECT_NO_THROW(c.validate());
    c.delta_theta = 0.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.coverage_threshold = 1.5;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.rearm_level = -0.1;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(TriggerConfigTest, JsonRoundTripAndUnknownPolicy) {
    TriggerConfig c;
    c.delta_theta = 0.25;
    c.rearm_policy = RearmPolicy::on_drop_below_theta;
    nlohmann::json j = c;
    EXPECT_EQ(j.get<TriggerConfig>(), c);
    j["rearm_policy"] = "sometimes";
    EXPECT_THROW(j.get<TriggerConfig>(), InvalidArgument);
}

TEST(ReminderText, ParsesValidAnswer) {
    const auto t = parse_reminder_response(R"({"summary": "S", "suggestion": "T"})");
    EXPECT_EQ(t.summary, "S");
    EXPECT_EQ(t.suggestion, "T");
    const auto fenced = parse_reminder_response("```json\n{\"summary\": \"a\", \"suggestion\": \"b\"}\n```");
    EXPECT_EQ(fenced.summary, "a");
}

TEST(ReminderText, RejectsMalformedAnswers) {
    EXPECT_THROW(parse_reminder_response("not json"), SchemaViolation);
    EXPECT_THROW(parse_reminder_response(R"({"summary": "S"})"), SchemaViolation);
    EXPECT_THROW(parse_reminder_response(R"({"summary": 1, "suggestion": "x"})"), SchemaViolation);
    EXPECT_THROW(parse_reminder_response(R"({"summary": "", "suggestion": "x"})"), SchemaViolation);
    EXPECT_THROW(parse_reminder_response(R"(["summary", "suggestion"])"), SchemaViolation);
}

namespace {

TriggerEvent negative_balance_trigger(const Workspace& ws, SessionState& st) {
    const auto neg = indices_with(ws, SentimentLabel::negative);
    for (int i = 0; i < 3; ++i) {
        st.useful[neg[i]] = i + 1;
        st.engagement.push_back(neg[i]);
    }
    auto t = evaluate_balance_trigger(st, ws, "t1", TriggerConfig{}, 3);
    EXPECT_TRUE(t);
    return *t;
}

} // namespace

TEST(ReminderText, FallbackForNegativeLean) {
    auto ws = single_topic(5, 2, 5);
    SessionState st;
    const auto trig = negative_balance_trigger(*ws, st);
    const auto t = fallback_text(trig, st, *ws);
    EXPECT_NE(t.suggestion.find("mainly read negative opinions"), std::string::npos);
    EXPECT_NE(t.suggestion.find("consider checking the other side"), std::string::npos);
    EXPECT_NE(t.summary.find("3 comments"), std::string::npos);
}

TEST(ReminderText, CoverageFallbackNamesLeastCoveredOtherTopic) {
    auto comments = labelled_block("room", 2, 0, 2);
    auto more = labelled_block("beach", 2, 0, 1);
    auto food = labelled_block("coffee", 1, 1, 1);
    comments.insert(comments.end(), more.begin(), more.end());
    comments.insert(comments.end(), food.begin(), food.end());
    auto ws = synthetic_workspace(comments, {{"Room", {"room"}}, {"Location", {"beach"}}, {"Dining", {"coffee"}}});
    Session s("s", ws, TriggerConfig{}, StepClock{0, 1});
    s.record_view(ws->corpus()[4].id);  // one beach comment viewed
    std::optional<TriggerEvent> trig;
    for (std::size_t i = 0; i < 4 && !trig; ++i) {
        auto out = s.record_view(ws->corpus()[i].id);
        if (!out.triggers.empty()) trig = out.triggers.front();
    }
    ASSERT_TRUE(trig);
    EXPECT_EQ(trig->topic_id, "t1");
    const auto t = fallback_text(*trig, s.state(), *ws);
    EXPECT_NE(t.summary.find("75%"), std::string::npos) << t.summary;
    EXPECT_NE(t.suggestion.find("'Dining'"), std::string::npos) << t.suggestion;
}

TEST(ReminderPromptTest, UsesSummaryTemplateAndRecentTopicComments) {
    auto ws = single_topic(5, 2, 12);
    SessionState st;
    const auto trig = negative_balance_trigger(*ws, st);
    for (std::size_t i = 0; i < 12; ++i) st.engagement.push_back(7 + i);
    const auto p = reminder_prompt(trig, st, *ws, TriggerConfig{});
    EXPECT_EQ(p.request.system, prompts::summary_system());
    EXPECT_NE(p.request.user.find(p.trigger_reason), std::string::npos);
    EXPECT_NE(p.request.user.find(p.statistics), std::string::npos);
    // Ten most recent, newest first.
    std::size_t lines = 1;
    for (char c : p.comment_texts) lines += c == '\n';
    EXPECT_EQ(lines, 10u);
    EXPECT_EQ(p.comment_texts.rfind("- " + ws->corpus()[18].text, 0), 0u);
}

TEST(AssembleReminder, GeneratorTextWhenValid) {
    auto ws = single_topic(5, 2, 5);
    SessionState st;
    const auto trig = negative_balance_trigger(*ws, st);
    ScriptedGenerator gen({R"({"summary": "Mostly complaints.", "suggestion": "Read praise too."})"});
    const auto r = assemble_reminder(trig, st, *ws, TriggerConfig{}, &gen, "r1", 42);
    EXPECT_EQ(r.text_source, "generator");
    EXPECT_EQ(r.summary, "Mostly complaints.");
    EXPECT_EQ(r.status, ReminderStatus::pending);
    EXPECT_EQ(r.grounding["negative"], 3);
    EXPECT_EQ(r.created_at, 42);
}

TEST(AssembleReminder, MalformedGeneratorAnswerFallsBack) {
    auto ws = single_topic(5, 2, 5);
    SessionState st;
    const auto trig = negative_balance_trigger(*ws, st);
    ScriptedGenerator gen({R"({"text": "oops"})"});
    const auto r = assemble_reminder(trig, st, *ws, TriggerConfig{}, &gen, "r1", 0);
    EXPECT_EQ(r.text_source, "fallback");
    EXPECT_NE(r.suggestion.find("consider checking the other side"), std::string::npos);
}

TEST(AssembleReminder, GeneratorFailureFallsBack) {
    auto ws = single_topic(5, 2, 5);
    SessionState st;
    const auto trig = negative_balance_trigger(*ws, st);
    ScriptedGenerator gen({});
    const auto r = assemble_reminder(trig, st, *ws, TriggerConfig{}, &gen, "r1", 0);
    EXPECT_EQ(r.text_source, "fallback");
    EXPECT_FALSE(r.summary.empty());
}

TEST(ReminderJson, RoundTrip) {
    auto ws = single_topic(5, 2, 5);
    SessionState st;
    const auto trig = negative_balance_trigger(*ws, st);
    auto r = assemble_reminder(trig, st, *ws, TriggerConfig{}, nullptr, "r7", 9);
    r.user_mind = "agree";
    r.status = ReminderStatus::added;
    nlohmann::json j = r;
    EXPECT_EQ(j.get<Reminder>(), r);
}
